#ifndef RMGEN_RASTER_IO_HPP
#define RMGEN_RASTER_IO_HPP

#include "rmgen/core.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rmgen {

/// A float32 raster as stored on disk: `<stem>.f32` holds the little-endian
/// row-major payload, `<stem>.json` the header
/// {"width", "height", "resolution_m", "dtype": "f32le"}.
struct RasterFile {
    RasterF values;
    double resolution = 1.0;
};

/// Sidecar header path for a payload path (`a/b.f32` -> `a/b.json`).
std::filesystem::path header_path(const std::filesystem::path& payload);

/// Throws MissingFile or MalformedRaster.
RasterFile read_raster(const std::filesystem::path& payload);

void write_raster(const std::filesystem::path& payload, const RasterF& values, double resolution);

/// 8-bit RGBA image (R, G, B, IR) in row-major interleaved order.
struct AerialImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;

    std::uint8_t at(int row, int col, int channel) const {
        return rgba[(static_cast<std::size_t>(row) * width + col) * 4 + channel];
    }
};

/// Reads an 8-bit 4-channel PNG. Other layouts raise MalformedRaster.
AerialImage read_aerial_png(const std::filesystem::path& path);
void write_aerial_png(const std::filesystem::path& path, const AerialImage& image);

}  // namespace rmgen

#endif  // RMGEN_RASTER_IO_HPP
