#include "rmgen/scene.hpp"

#include "rmgen/errors.hpp"

#include <cmath>
#include <sstream>

namespace rmgen {

namespace fs = std::filesystem;

HeightGrid::HeightGrid(RasterF values, double resolution)
    : values_(std::move(values)), resolution_(resolution) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw MalformedRaster("height grid must have at least one cell");
    if (!(resolution_ > 0.0) || !std::isfinite(resolution_))
        throw MalformedRaster("resolution must be positive");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        const float v = values_.data()[i];
        if (!std::isfinite(v)) throw MalformedRaster("non-finite height value");
        if (v < 0.0f) {
            std::ostringstream msg;
            msg << "value " << v << " at cell " << i / values_.cols() << "," << i % values_.cols();
            throw NegativeHeight(msg.str());
        }
    }
}

double sample_height(const HeightGrid& grid, double x, double y) {
    const GridGeometry g = grid.geometry();
    if (!g.contains(x, y)) {
        std::ostringstream msg;
        msg << "(" << x << ", " << y << ") outside [0," << g.extent_x() << ")x[0," << g.extent_y() << ")";
        throw OutOfBounds(msg.str());
    }
    return grid(g.row_of(y), g.col_of(x));
}

Scene::Scene(HeightGrid buildings, HeightGrid vegetation, std::optional<AerialImage> aerial)
    : buildings_(std::move(buildings)), vegetation_(std::move(vegetation)), aerial_(std::move(aerial)) {
    if (buildings_.geometry() != vegetation_.geometry()) {
        std::ostringstream msg;
        msg << "buildings " << buildings_.width() << "x" << buildings_.height() << "@" << buildings_.resolution()
            << " vs vegetation " << vegetation_.width() << "x" << vegetation_.height() << "@"
            << vegetation_.resolution();
        throw DimensionMismatch(msg.str());
    }
    if (aerial_ && (aerial_->width != width() || aerial_->height != height()))
        throw DimensionMismatch("aerial image does not match grid dimensions");
}

Scene load_scene(const fs::path& buildings_path, const fs::path& vegetation_path,
                 const std::optional<fs::path>& aerial_path) {
    RasterFile b = read_raster(buildings_path);
    RasterFile v = read_raster(vegetation_path);
    std::optional<AerialImage> aerial;
    if (aerial_path) aerial = read_aerial_png(*aerial_path);
    return Scene(HeightGrid(std::move(b.values), b.resolution), HeightGrid(std::move(v.values), v.resolution),
                 std::move(aerial));
}

Scene load_scene_dir(const fs::path& dir) {
    std::optional<fs::path> aerial;
    if (fs::exists(dir / "aerial.png")) aerial = dir / "aerial.png";
    return load_scene(dir / "buildings.f32", dir / "vegetation.f32", aerial);
}

void save_scene_dir(const Scene& scene, const fs::path& dir) {
    fs::create_directories(dir);
    write_raster(dir / "buildings.f32", scene.buildings().values(), scene.resolution());
    write_raster(dir / "vegetation.f32", scene.vegetation().values(), scene.resolution());
    if (scene.aerial()) write_aerial_png(dir / "aerial.png", *scene.aerial());
}

std::vector<VerticalFace> extract_wall_faces(const Scene& scene) {
    const int w = scene.width();
    const int h = scene.height();
    const double res = scene.resolution();
    auto height_at = [&](int row, int col) -> double {
        if (row < 0 || col < 0 || row >= h || col >= w) return 0.0;
        return scene.building(row, col);
    };

    std::vector<VerticalFace> faces;
    // Boundary x = k*res between columns k-1 and k.
    for (int row = 0; row < h; ++row) {
        for (int k = 0; k <= w; ++k) {
            const double left = height_at(row, k - 1);
            const double right = height_at(row, k);
            if (left == right) continue;
            VerticalFace f;
            f.axis = VerticalFace::Axis::X;
            f.plane = k * res;
            f.lo = row * res;
            f.hi = (row + 1) * res;
            f.z0 = std::min(left, right);
            f.z1 = std::max(left, right);
            f.normal_sign = left > right ? +1 : -1;
            faces.push_back(f);
        }
    }
    // Boundary y = k*res between rows k-1 and k.
    for (int k = 0; k <= h; ++k) {
        for (int col = 0; col < w; ++col) {
            const double below = height_at(k - 1, col);
            const double above = height_at(k, col);
            if (below == above) continue;
            VerticalFace f;
            f.axis = VerticalFace::Axis::Y;
            f.plane = k * res;
            f.lo = col * res;
            f.hi = (col + 1) * res;
            f.z0 = std::min(below, above);
            f.z1 = std::max(below, above);
            f.normal_sign = below > above ? +1 : -1;
            faces.push_back(f);
        }
    }
    return faces;
}

}  // namespace rmgen
