#ifndef RMGEN_TX_HPP
#define RMGEN_TX_HPP

#include "rmgen/antenna.hpp"
#include "rmgen/grid.hpp"

#include <cmath>
#include <string>

namespace rmgen {

/// Transmitter placement: position (meters), boresight and pattern.
struct TxConfig {
    Vec3 position = Vec3::Zero();
    Orientation orientation;
    AntennaPattern pattern;
    std::string pattern_id;
    std::string scene_id;

    friend bool operator==(const TxConfig&, const TxConfig&) = default;
};

/// Horizontal azimuth of `point` seen from the Tx, relative to the boresight
/// azimuth, wrapped to (-180, 180]. Zero at the Tx location itself.
inline double relative_azimuth_deg(const TxConfig& tx, const Vec2& point) {
    double s, c;
    sincos_deg(tx.orientation.azimuth_deg, s, c);
    const double dx = point.x() - tx.position.x();
    const double dy = point.y() - tx.position.y();
    if (dx == 0.0 && dy == 0.0) return 0.0;
    const double along = dx * c + dy * s;
    const double across = -dx * s + dy * c;
    return wrap_deg_pm180(rad2deg(std::atan2(across, along)));
}

/// Inside the horizontal first-null sector around the boresight azimuth.
inline bool in_fnbw_sector(const TxConfig& tx, const Vec2& point) {
    if (tx.pattern.fnbw_deg >= 360.0) return true;
    return std::abs(relative_azimuth_deg(tx, point)) <= tx.pattern.fnbw_deg / 2.0;
}

}  // namespace rmgen

#endif  // RMGEN_TX_HPP
