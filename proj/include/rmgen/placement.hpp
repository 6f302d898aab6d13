#ifndef RMGEN_PLACEMENT_HPP
#define RMGEN_PLACEMENT_HPP

#include "rmgen/scene.hpp"
#include "rmgen/tx.hpp"

#include <vector>

namespace rmgen {

inline constexpr double kTxAboveRoof = 2.0;
inline constexpr double kTxMinHeight = 6.0;
inline constexpr double kTxMaxHeight = 30.0;

struct PlacementOptions {
    double azimuth_step_deg = 15.0;
    std::vector<double> tilts_deg{0.0, -5.0, -10.0, -15.0, -20.0};
    double min_coverage = 0.05;
};

/// A building cell with at least one 4-neighbour that is not building
/// (cells outside the grid count as not building).
bool is_roof_edge(const Scene& scene, int row, int col);

/// Mean outward normal of the exposed sides of a roof-edge cell. Zero when
/// the exposed sides cancel (e.g. an isolated single cell).
Vec2 outward_normal(const Scene& scene, int row, int col);

/// Cell centres of roof-edge cells with z = roof + 2 m inside [6, 30] m,
/// row-major.
std::vector<Vec3> candidate_positions(const Scene& scene);

/// Fraction of ground pixels (no building) inside the horizontal first-null
/// sector that have ground line of sight. Zero when the sector holds none.
double ground_coverage(const Scene& scene, const TxConfig& tx);

/// Orientations pointing away from the host building (azimuth strictly
/// within 90 degrees of the outward normal) whose ground coverage reaches
/// `min_coverage`. Azimuth-major, then tilts in the given order. An empty
/// result means no valid orientation. Throws PreconditionViolation for a
/// step that does not divide 360 or a coverage outside (0, 1].
std::vector<Orientation> search_orientations(const Scene& scene, const Vec3& position, const AntennaPattern& pattern,
                                             double azimuth_step_deg, const std::vector<double>& tilts_deg,
                                             double min_coverage);

/// True when a TxConfig satisfies the placement invariants for the scene.
bool satisfies_placement_invariants(const Scene& scene, const TxConfig& tx);

}  // namespace rmgen

#endif  // RMGEN_PLACEMENT_HPP
