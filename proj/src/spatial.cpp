#include "rmgen/spatial.hpp"

namespace rmgen {

std::string to_string(SpatialOp op) {
    switch (op) {
        case SpatialOp::FlipH: return "flip_h";
        case SpatialOp::FlipV: return "flip_v";
        case SpatialOp::Rot90: return "rot90";
        case SpatialOp::Rot180: return "rot180";
        case SpatialOp::Rot270: return "rot270";
    }
    return "unknown";
}

std::optional<SpatialOp> spatial_op_from_string(const std::string& name) {
    for (SpatialOp op : {SpatialOp::FlipH, SpatialOp::FlipV, SpatialOp::Rot90, SpatialOp::Rot180, SpatialOp::Rot270})
        if (to_string(op) == name) return op;
    return std::nullopt;
}

SpatialOp inverse(SpatialOp op) {
    if (op == SpatialOp::Rot90) return SpatialOp::Rot270;
    if (op == SpatialOp::Rot270) return SpatialOp::Rot90;
    return op;
}

GridGeometry apply_spatial(SpatialOp op, const GridGeometry& g) {
    if (op == SpatialOp::Rot90 || op == SpatialOp::Rot270) return {g.height, g.width, g.resolution};
    return g;
}

Vec2 apply_spatial(SpatialOp op, const GridGeometry& g, const Vec2& p) {
    const double w = g.extent_x();
    const double h = g.extent_y();
    switch (op) {
        case SpatialOp::FlipH: return {w - p.x(), p.y()};
        case SpatialOp::FlipV: return {p.x(), h - p.y()};
        case SpatialOp::Rot90: return {p.y(), w - p.x()};
        case SpatialOp::Rot180: return {w - p.x(), h - p.y()};
        case SpatialOp::Rot270: return {h - p.y(), p.x()};
    }
    return p;
}

double apply_spatial_azimuth(SpatialOp op, double az) {
    switch (op) {
        case SpatialOp::FlipH: return wrap_deg_360(180.0 - az);
        case SpatialOp::FlipV: return wrap_deg_360(-az);
        case SpatialOp::Rot90: return wrap_deg_360(az - 90.0);
        case SpatialOp::Rot180: return wrap_deg_360(az + 180.0);
        case SpatialOp::Rot270: return wrap_deg_360(az + 90.0);
    }
    return az;
}

TxConfig apply_spatial(SpatialOp op, const GridGeometry& source, const TxConfig& tx) {
    TxConfig out = tx;
    const Vec2 p = apply_spatial(op, source, Vec2(tx.position.head<2>()));
    out.position = Vec3(p.x(), p.y(), tx.position.z());
    out.orientation = Orientation(apply_spatial_azimuth(op, tx.orientation.azimuth_deg), tx.orientation.tilt_deg);
    return out;
}

Scene apply_spatial(SpatialOp op, const Scene& scene) {
    HeightGrid b(apply_spatial(op, scene.buildings().values()), scene.resolution());
    HeightGrid v(apply_spatial(op, scene.vegetation().values()), scene.resolution());
    std::optional<AerialImage> aerial;
    if (scene.aerial()) {
        const AerialImage& src = *scene.aerial();
        AerialImage dst;
        Raster<int> index(src.height, src.width);
        for (int r = 0; r < src.height; ++r)
            for (int c = 0; c < src.width; ++c) index(r, c) = r * src.width + c;
        const Raster<int> moved = apply_spatial(op, index);
        dst.height = static_cast<int>(moved.rows());
        dst.width = static_cast<int>(moved.cols());
        dst.rgba.resize(src.rgba.size());
        for (Eigen::Index i = 0; i < moved.size(); ++i)
            for (int ch = 0; ch < 4; ++ch) dst.rgba[i * 4 + ch] = src.rgba[moved.data()[i] * 4 + ch];
        aerial = std::move(dst);
    }
    return Scene(std::move(b), std::move(v), std::move(aerial));
}

}  // namespace rmgen
