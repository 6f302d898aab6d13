#ifndef RMGEN_VISIBILITY_HPP
#define RMGEN_VISIBILITY_HPP

#include "rmgen/scene.hpp"
#include "rmgen/tx.hpp"

namespace rmgen {

inline constexpr double kDefaultRxHeight = 1.5;
inline constexpr double kDefaultLosCeiling = 32.0;

/// Line-of-sight maps for one Tx. Binary maps hold 0/1.
struct LosMaps {
    RasterF ground;       ///< receiver point (rx height) visible
    RasterF top;          ///< building top visible; 0 where there is no building
    RasterF min_visible;  ///< lowest visible z per pixel, capped at the ceiling
    RasterF cone_mask;    ///< inside the horizontal first-null sector
};

/// All LoS maps from one ray march per pixel. Only buildings obstruct;
/// vegetation is transparent here. Pixels outside the sector get
/// ground = top = 0 and min_visible = ceiling. Throws TxOutOfBounds.
LosMaps compute_los(const Scene& scene, const TxConfig& tx, double ceiling = kDefaultLosCeiling,
                    double rx_height = kDefaultRxHeight, unsigned jobs = 1);

RasterF los_ground(const Scene& scene, const TxConfig& tx, double rx_height = kDefaultRxHeight);
RasterF los_top(const Scene& scene, const TxConfig& tx);
RasterF min_visible_height(const Scene& scene, const TxConfig& tx, double ceiling = kDefaultLosCeiling);
RasterF cone_mask(const GridGeometry& geometry, const TxConfig& tx);

void require_tx_inside(const Scene& scene, const TxConfig& tx);

}  // namespace rmgen

#endif  // RMGEN_VISIBILITY_HPP
