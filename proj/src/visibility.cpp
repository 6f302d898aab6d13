#include "rmgen/visibility.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/parallel.hpp"
#include "rmgen/traversal.hpp"

#include <limits>
#include <sstream>

namespace rmgen {

void require_tx_inside(const Scene& scene, const TxConfig& tx) {
    const GridGeometry g = scene.geometry();
    if (!g.contains(tx.position.x(), tx.position.y()) || !std::isfinite(tx.position.z())) {
        std::ostringstream msg;
        msg << "Tx at (" << tx.position.transpose() << ") outside scene extent";
        throw TxOutOfBounds(msg.str());
    }
}

namespace {

struct PixelLos {
    bool ground = false;
    bool top = false;
    double min_visible = 0.0;
};

// Steepest blocking slope along the horizontal ray Tx -> pixel centre, with
// every building cell sampled at its entry and exit distance. The sample at
// the pixel centre itself is left out; it is the target, not an obstacle.
PixelLos march(const Scene& scene, const Vec3& tx, int row, int col, double rx_height) {
    const GridGeometry g = scene.geometry();
    const Vec2 target = g.cell_center(row, col);
    const double h_target = scene.building(row, col);
    const double distance = (target - tx.head<2>()).norm();

    double reach = -std::numeric_limits<double>::infinity();  // z reachable at the target
    if (distance >= kMinSpan) {
        double s_max = -std::numeric_limits<double>::infinity();
        traverse_cells(g, tx.head<2>(), target, [&](int r, int c, double t0, double t1) {
            const double h = scene.building(r, c);
            if (h <= 0.0) return true;
            if (t0 > 0.0) s_max = std::max(s_max, (h - tx.z()) / (t0 * distance));
            if (t1 < 1.0) s_max = std::max(s_max, (h - tx.z()) / (t1 * distance));
            return true;
        });
        reach = tx.z() + distance * s_max;
    }

    // Binary maps are read off the stored (float) value so that they agree
    // with min_visible exactly.
    PixelLos out;
    const float lowest = static_cast<float>(std::max(h_target, reach));
    out.min_visible = lowest;
    out.ground = lowest <= rx_height;
    out.top = h_target > 0.0 && lowest <= h_target;
    return out;
}

}  // namespace

RasterF cone_mask(const GridGeometry& g, const TxConfig& tx) {
    RasterF mask(g.height, g.width);
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col)
            mask(row, col) = in_fnbw_sector(tx, g.cell_center(row, col)) ? 1.0f : 0.0f;
    return mask;
}

LosMaps compute_los(const Scene& scene, const TxConfig& tx, double ceiling, double rx_height, unsigned jobs) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    LosMaps maps;
    maps.cone_mask = cone_mask(g, tx);
    maps.ground = RasterF::Zero(g.height, g.width);
    maps.top = RasterF::Zero(g.height, g.width);
    maps.min_visible = RasterF::Constant(g.height, g.width, static_cast<float>(ceiling));

    parallel_for(static_cast<std::size_t>(g.height), jobs, [&](std::size_t r) {
        const int row = static_cast<int>(r);
        for (int col = 0; col < g.width; ++col) {
            if (maps.cone_mask(row, col) == 0.0f) continue;
            const PixelLos p = march(scene, tx.position, row, col, rx_height);
            maps.ground(row, col) = p.ground ? 1.0f : 0.0f;
            maps.top(row, col) = p.top ? 1.0f : 0.0f;
            maps.min_visible(row, col) = std::min(static_cast<float>(p.min_visible), static_cast<float>(ceiling));
        }
    });
    return maps;
}

RasterF los_ground(const Scene& scene, const TxConfig& tx, double rx_height) {
    return compute_los(scene, tx, kDefaultLosCeiling, rx_height).ground;
}

RasterF los_top(const Scene& scene, const TxConfig& tx) { return compute_los(scene, tx).top; }

RasterF min_visible_height(const Scene& scene, const TxConfig& tx, double ceiling) {
    return compute_los(scene, tx, ceiling).min_visible;
}

}  // namespace rmgen
