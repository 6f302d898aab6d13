#include "rmgen/raster_io.hpp"

#include "rmgen/errors.hpp"

#include <json.hpp>
#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rmgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

}  // namespace

fs::path header_path(const fs::path& payload) {
    fs::path p = payload;
    p.replace_extension(".json");
    return p;
}

RasterFile read_raster(const fs::path& payload) {
    const fs::path header = header_path(payload);
    if (!fs::exists(header)) throw MissingFile(header.string());
    if (!fs::exists(payload)) throw MissingFile(payload.string());

    json h;
    {
        std::ifstream in(header);
        try {
            h = json::parse(in);
        } catch (const json::exception& e) {
            throw MalformedRaster(header.string() + ": " + e.what());
        }
    }
    int width = 0, height = 0;
    double resolution = 0.0;
    try {
        width = h.at("width").get<int>();
        height = h.at("height").get<int>();
        resolution = h.at("resolution_m").get<double>();
        if (h.at("dtype").get<std::string>() != "f32le")
            throw MalformedRaster(header.string() + ": unsupported dtype");
    } catch (const json::exception& e) {
        throw MalformedRaster(header.string() + ": " + e.what());
    }
    if (width < 1 || height < 1 || !(resolution > 0.0) || !std::isfinite(resolution))
        throw MalformedRaster(header.string() + ": invalid dimensions or resolution");

    const std::uintmax_t expected = static_cast<std::uintmax_t>(width) * height * 4;
    const std::uintmax_t actual = fs::file_size(payload);
    if (actual != expected) {
        std::ostringstream msg;
        msg << payload.string() << ": payload is " << actual << " bytes, header implies " << expected;
        throw MalformedRaster(msg.str());
    }

    std::vector<std::uint32_t> words(static_cast<std::size_t>(width) * height);
    std::ifstream in(payload, std::ios::binary);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(expected));
    if (!in) throw MalformedRaster(payload.string() + ": short read");

    RasterFile out;
    out.resolution = resolution;
    out.values.resize(height, width);
    float* dst = out.values.data();
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::uint32_t w = to_little_endian(words[i]);
        std::memcpy(dst + i, &w, 4);
    }
    return out;
}

void write_raster(const fs::path& payload, const RasterF& values, double resolution) {
    if (payload.has_parent_path()) fs::create_directories(payload.parent_path());
    const std::size_t n = static_cast<std::size_t>(values.size());
    std::vector<std::uint32_t> words(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t w;
        std::memcpy(&w, values.data() + i, 4);
        words[i] = to_little_endian(w);
    }
    {
        std::ofstream out(payload, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(n * 4));
        if (!out) throw Error("cannot write " + payload.string());
    }
    json h = {{"width", values.cols()},
              {"height", values.rows()},
              {"resolution_m", resolution},
              {"dtype", "f32le"}};
    std::ofstream out(header_path(payload), std::ios::trunc);
    out << h.dump() << '\n';
}

AerialImage read_aerial_png(const fs::path& path) {
    if (!fs::exists(path)) throw MissingFile(path.string());
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw MalformedRaster(path.string() + ": " + image.message);

    const bool rgba = (image.format & PNG_FORMAT_FLAG_COLOR) && (image.format & PNG_FORMAT_FLAG_ALPHA) &&
                      !(image.format & PNG_FORMAT_FLAG_LINEAR);
    if (!rgba) {
        png_image_free(&image);
        throw MalformedRaster(path.string() + ": expected 8-bit 4-channel PNG");
    }
    image.format = PNG_FORMAT_RGBA;

    AerialImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.rgba.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr))
        throw MalformedRaster(path.string() + ": " + image.message);
    return out;
}

void write_aerial_png(const fs::path& path, const AerialImage& img) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGBA;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.rgba.data(), 0, nullptr))
        throw Error("cannot write " + path.string() + ": " + image.message);
}

}  // namespace rmgen
