#ifndef RMGEN_SPATIAL_HPP
#define RMGEN_SPATIAL_HPP

#include "rmgen/scene.hpp"
#include "rmgen/tx.hpp"

#include <optional>
#include <string>

namespace rmgen {

/// Grid symmetries used for augmentation. In world coordinates:
///   rot90:  (x, y) -> (y, W - x),      azimuth -> azimuth - 90
///   rot180: (x, y) -> (W - x, H - y),  azimuth -> azimuth + 180
///   rot270: (x, y) -> (H - y, x),      azimuth -> azimuth + 90
///   flip_h: (x, y) -> (W - x, y),      azimuth -> 180 - azimuth
///   flip_v: (x, y) -> (x, H - y),      azimuth -> -azimuth
/// where W, H are the extents of the source grid.
enum class SpatialOp { FlipH, FlipV, Rot90, Rot180, Rot270 };

std::string to_string(SpatialOp op);
std::optional<SpatialOp> spatial_op_from_string(const std::string& name);
SpatialOp inverse(SpatialOp op);

template <typename Derived>
Raster<typename Derived::Scalar> apply_spatial(SpatialOp op, const Eigen::DenseBase<Derived>& in) {
    using Out = Raster<typename Derived::Scalar>;
    switch (op) {
        case SpatialOp::FlipH: return Out(in.rowwise().reverse());
        case SpatialOp::FlipV: return Out(in.colwise().reverse());
        case SpatialOp::Rot90: return Out(in.transpose().colwise().reverse());
        case SpatialOp::Rot180: return Out(in.reverse());
        case SpatialOp::Rot270: return Out(in.transpose().rowwise().reverse());
    }
    return Out(in);
}

GridGeometry apply_spatial(SpatialOp op, const GridGeometry& g);
Vec2 apply_spatial(SpatialOp op, const GridGeometry& source, const Vec2& p);
double apply_spatial_azimuth(SpatialOp op, double azimuth_deg);

TxConfig apply_spatial(SpatialOp op, const GridGeometry& source, const TxConfig& tx);
Scene apply_spatial(SpatialOp op, const Scene& scene);

}  // namespace rmgen

#endif  // RMGEN_SPATIAL_HPP
