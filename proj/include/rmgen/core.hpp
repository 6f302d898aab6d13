#ifndef RMGEN_CORE_HPP
#define RMGEN_CORE_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace rmgen {

/// Row-major dense raster. Row index grows with y, column index with x.
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RasterF = Raster<float>;
using RasterD = Raster<double>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
    return deg * Scalar(kPi / 180.0);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
    return rad * Scalar(180.0 / kPi);
}

/// sin/cos of an angle in degrees, reduced to the first octant so that
/// angles related by multiples of 90 degrees (and by reflection about 45)
/// produce bit-identical magnitudes. Multiples of 90 are exact.
inline void sincos_deg(double deg, double& s, double& c) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    const int quadrant = static_cast<int>(a / 90.0) % 4;
    const double r = a - 90.0 * quadrant;  // [0, 90)
    double rs, rc;
    if (r == 0.0) {
        rs = 0.0;
        rc = 1.0;
    } else if (r == 45.0) {
        rs = rc = std::sqrt(0.5);
    } else if (r < 45.0) {
        rs = std::sin(deg2rad(r));
        rc = std::cos(deg2rad(r));
    } else {
        rs = std::cos(deg2rad(90.0 - r));
        rc = std::sin(deg2rad(90.0 - r));
    }
    switch (quadrant) {
        case 0: s = rs;  c = rc;  break;
        case 1: s = rc;  c = -rs; break;
        case 2: s = -rs; c = -rc; break;
        default: s = -rc; c = rs; break;
    }
}

/// Wrap to (-180, 180].
inline double wrap_deg_pm180(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a > 180.0) a -= 360.0;
    if (a <= -180.0) a += 360.0;
    return a;
}

/// Wrap to [0, 360).
inline double wrap_deg_360(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    if (a >= 360.0) a -= 360.0;
    return a;
}

/// Horizontal unit vector for an azimuth measured from +x towards +y.
inline Vec2 azimuth_vector(double azimuth_deg) {
    double s, c;
    sincos_deg(azimuth_deg, s, c);
    return {c, s};
}

}  // namespace rmgen

#endif  // RMGEN_CORE_HPP
