#ifndef RMGEN_SYNTHETIC_HPP
#define RMGEN_SYNTHETIC_HPP

#include "rmgen/scene.hpp"

#include <cstdint>

namespace rmgen {

struct SyntheticSpec {
    int grid_size = 64;
    int n_buildings = 8;
    double height_min = 4.0;
    double height_max = 28.0;
    double vegetation_density = 0.05;  ///< target fraction of ground cells covered
    std::uint64_t seed = 0;
    double resolution = 1.0;
    bool aerial = false;  ///< also render a false-colour 4-channel aerial image
};

/// Seeded random rectangular buildings (one flat roof each, overlaps keep the
/// taller) plus round vegetation blobs on ground cells. Deterministic per spec.
Scene generate_synthetic_scene(const SyntheticSpec& spec);

}  // namespace rmgen

#endif  // RMGEN_SYNTHETIC_HPP
