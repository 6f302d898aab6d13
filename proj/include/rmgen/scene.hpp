#ifndef RMGEN_SCENE_HPP
#define RMGEN_SCENE_HPP

#include "rmgen/grid.hpp"
#include "rmgen/raster_io.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace rmgen {

/// Height above the flat ground (meters) per cell. Values are finite and
/// non-negative; enforced on construction.
class HeightGrid {
public:
    HeightGrid(RasterF values, double resolution);

    int width() const { return static_cast<int>(values_.cols()); }
    int height() const { return static_cast<int>(values_.rows()); }
    double resolution() const { return resolution_; }
    GridGeometry geometry() const { return {width(), height(), resolution_}; }

    float operator()(int row, int col) const { return values_(row, col); }
    const RasterF& values() const { return values_; }

private:
    RasterF values_;
    double resolution_;
};

/// Nearest-cell height lookup at a horizontal position. Throws OutOfBounds
/// outside [0, extent).
double sample_height(const HeightGrid& grid, double x, double y);

/// Immutable simulation environment: buildings and vegetation nDSMs over
/// the flat ground plane z = 0, plus an optional aerial image.
class Scene {
public:
    Scene(HeightGrid buildings, HeightGrid vegetation, std::optional<AerialImage> aerial = std::nullopt);

    const HeightGrid& buildings() const { return buildings_; }
    const HeightGrid& vegetation() const { return vegetation_; }
    const std::optional<AerialImage>& aerial() const { return aerial_; }

    GridGeometry geometry() const { return buildings_.geometry(); }
    int width() const { return buildings_.width(); }
    int height() const { return buildings_.height(); }
    double resolution() const { return buildings_.resolution(); }
    double extent() const { return geometry().extent_x(); }

    double building(int row, int col) const { return buildings_(row, col); }
    double vegetation(int row, int col) const { return vegetation_(row, col); }

private:
    HeightGrid buildings_;
    HeightGrid vegetation_;
    std::optional<AerialImage> aerial_;
};

Scene load_scene(const std::filesystem::path& buildings_path,
                 const std::filesystem::path& vegetation_path,
                 const std::optional<std::filesystem::path>& aerial_path = std::nullopt);

/// Scene directory layout: buildings.f32/.json, vegetation.f32/.json and an
/// optional aerial.png.
Scene load_scene_dir(const std::filesystem::path& dir);
void save_scene_dir(const Scene& scene, const std::filesystem::path& dir);

/// Axis-aligned vertical rectangle on a cell boundary.
struct VerticalFace {
    enum class Axis { X, Y };  // X: plane x = const, normal along +-x
    Axis axis = Axis::X;
    double plane = 0.0;        // coordinate of the plane
    double lo = 0.0, hi = 0.0; // extent along the other horizontal axis
    double z0 = 0.0, z1 = 0.0; // bottom and top
    int normal_sign = 1;       // outward normal points towards the lower cell

    Vec3 normal() const {
        return axis == Axis::X ? Vec3(normal_sign, 0.0, 0.0) : Vec3(0.0, normal_sign, 0.0);
    }
    double width() const { return hi - lo; }
    double area() const { return (hi - lo) * (z1 - z0); }
};

/// One face per boundary between horizontally adjacent cells with unequal
/// building height, including boundaries against the (zero-height) outside
/// of the grid. Boundaries of constant x come first (row-major), then
/// boundaries of constant y.
std::vector<VerticalFace> extract_wall_faces(const Scene& scene);

}  // namespace rmgen

#endif  // RMGEN_SCENE_HPP
