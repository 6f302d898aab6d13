#ifndef RMGEN_GRID_HPP
#define RMGEN_GRID_HPP

#include "rmgen/core.hpp"

#include <algorithm>
#include <cmath>

namespace rmgen {

/// Pixel layout shared by every raster of a scene. Cell (row, col) covers
/// x in [col*res, (col+1)*res) and y in [row*res, (row+1)*res).
struct GridGeometry {
    int width = 0;
    int height = 0;
    double resolution = 1.0;

    double extent_x() const { return width * resolution; }
    double extent_y() const { return height * resolution; }
    double diagonal() const { return std::hypot(extent_x(), extent_y()); }

    Vec2 cell_center(int row, int col) const {
        return {(col + 0.5) * resolution, (row + 0.5) * resolution};
    }

    bool contains(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x < extent_x() && y < extent_y();
    }

    int col_of(double x) const {
        return std::clamp(static_cast<int>(std::floor(x / resolution)), 0, width - 1);
    }
    int row_of(double y) const {
        return std::clamp(static_cast<int>(std::floor(y / resolution)), 0, height - 1);
    }

    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

}  // namespace rmgen

#endif  // RMGEN_GRID_HPP
