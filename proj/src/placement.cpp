#include "rmgen/placement.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/visibility.hpp"

#include <cmath>

namespace rmgen {

namespace {

constexpr int kNeighbours[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};  // (drow, dcol): -x, +x, -y, +y

bool is_building(const Scene& scene, int row, int col) {
    if (row < 0 || col < 0 || row >= scene.height() || col >= scene.width()) return false;
    return scene.building(row, col) > 0.0;
}

}  // namespace

bool is_roof_edge(const Scene& scene, int row, int col) {
    if (!is_building(scene, row, col)) return false;
    for (const auto& n : kNeighbours)
        if (!is_building(scene, row + n[0], col + n[1])) return true;
    return false;
}

Vec2 outward_normal(const Scene& scene, int row, int col) {
    Vec2 sum = Vec2::Zero();
    for (const auto& n : kNeighbours)
        if (!is_building(scene, row + n[0], col + n[1])) sum += Vec2(n[1], n[0]);
    return sum.norm() > 0.0 ? Vec2(sum.normalized()) : Vec2::Zero();
}

std::vector<Vec3> candidate_positions(const Scene& scene) {
    const GridGeometry g = scene.geometry();
    std::vector<Vec3> out;
    for (int row = 0; row < g.height; ++row) {
        for (int col = 0; col < g.width; ++col) {
            if (!is_roof_edge(scene, row, col)) continue;
            const double z = scene.building(row, col) + kTxAboveRoof;
            if (z < kTxMinHeight || z > kTxMaxHeight) continue;
            const Vec2 c = g.cell_center(row, col);
            out.emplace_back(c.x(), c.y(), z);
        }
    }
    return out;
}

double ground_coverage(const Scene& scene, const TxConfig& tx) {
    const LosMaps los = compute_los(scene, tx);
    std::size_t in_cone = 0, visible = 0;
    for (int row = 0; row < scene.height(); ++row) {
        for (int col = 0; col < scene.width(); ++col) {
            if (los.cone_mask(row, col) == 0.0f || scene.building(row, col) > 0.0) continue;
            ++in_cone;
            if (los.ground(row, col) != 0.0f) ++visible;
        }
    }
    return in_cone == 0 ? 0.0 : static_cast<double>(visible) / static_cast<double>(in_cone);
}

std::vector<Orientation> search_orientations(const Scene& scene, const Vec3& position, const AntennaPattern& pattern,
                                             double azimuth_step_deg, const std::vector<double>& tilts_deg,
                                             double min_coverage) {
    if (!(min_coverage > 0.0 && min_coverage <= 1.0))
        throw PreconditionViolation("min_coverage must lie in (0, 1]");
    if (!(azimuth_step_deg > 0.0)) throw PreconditionViolation("azimuth step must be positive");
    const double steps = 360.0 / azimuth_step_deg;
    if (std::abs(steps - std::round(steps)) > 1e-9) throw PreconditionViolation("azimuth step must divide 360");

    const GridGeometry g = scene.geometry();
    const int row = g.row_of(position.y());
    const int col = g.col_of(position.x());
    const Vec2 normal = outward_normal(scene, row, col);

    TxConfig tx;
    tx.position = position;
    tx.pattern = pattern;

    std::vector<Orientation> out;
    const int n = static_cast<int>(std::round(steps));
    for (int i = 0; i < n; ++i) {
        const double azimuth = i * azimuth_step_deg;
        if (normal.squaredNorm() > 0.0 && azimuth_vector(azimuth).dot(normal) <= 1e-9) continue;
        // The sector is horizontal, so coverage does not depend on tilt.
        tx.orientation = Orientation(azimuth, 0.0);
        if (ground_coverage(scene, tx) < min_coverage) continue;
        for (double tilt : tilts_deg) out.emplace_back(azimuth, tilt);
    }
    return out;
}

bool satisfies_placement_invariants(const Scene& scene, const TxConfig& tx) {
    const GridGeometry g = scene.geometry();
    if (!g.contains(tx.position.x(), tx.position.y())) return false;
    const int row = g.row_of(tx.position.y());
    const int col = g.col_of(tx.position.x());
    if (!is_roof_edge(scene, row, col)) return false;
    const double z = tx.position.z();
    return z == scene.building(row, col) + kTxAboveRoof && z >= kTxMinHeight && z <= kTxMaxHeight;
}

}  // namespace rmgen
