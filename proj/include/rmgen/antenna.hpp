#ifndef RMGEN_ANTENNA_HPP
#define RMGEN_ANTENNA_HPP

#include "rmgen/core.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rmgen {

/// Main-lobe shape relative to the peak, in dB, for an off-axis angle psi
/// (degrees): -3 (psi / (hpbw/2))^2 inside the first null, clamped at the
/// floor; the floor everywhere beyond fnbw/2. Rotationally symmetric.
template <typename Scalar>
Scalar main_lobe_shape_db(Scalar psi_deg, Scalar hpbw_deg, Scalar fnbw_deg, Scalar floor_db) {
    if (psi_deg >= fnbw_deg / Scalar(2)) return floor_db;
    const Scalar u = psi_deg / (hpbw_deg / Scalar(2));
    return std::max(Scalar(-3) * u * u, floor_db);
}

/// Idealized single-main-lobe directional antenna.
struct AntennaPattern {
    double hpbw_deg = 0.0;
    double fnbw_deg = 0.0;
    double peak_db = 0.0;   ///< gain at boresight (dBi)
    double floor_db = -30;  ///< side/back level relative to the peak

    double floor_gain_db() const { return peak_db + floor_db; }

    /// Gain (dB) at off-axis angle psi in degrees.
    double gain_offaxis(double psi_deg) const {
        return peak_db + main_lobe_shape_db(psi_deg, hpbw_deg, fnbw_deg, floor_db);
    }

    /// Builds a validated pattern. When `peak_db` is empty the peak is the
    /// directivity of the shape, so all patterns radiate the same power.
    static AntennaPattern make(double hpbw_deg, double fnbw_deg, double floor_db = -30.0,
                               std::optional<double> peak_db = std::nullopt);

    /// Short identifier, e.g. "hpbw15_fnbw30".
    std::string id() const;

    friend bool operator==(const AntennaPattern&, const AntennaPattern&) = default;
};

/// Boresight direction. Azimuth is measured from +x towards +y and kept in
/// [0, 360); negative tilt points below the horizon.
struct Orientation {
    double azimuth_deg = 0.0;
    double tilt_deg = 0.0;

    Orientation() = default;
    Orientation(double azimuth, double tilt) : azimuth_deg(wrap_deg_360(azimuth)), tilt_deg(tilt) {}

    Vec3 boresight() const;

    friend bool operator==(const Orientation&, const Orientation&) = default;
};

/// Unit vector for (azimuth, elevation) in degrees.
Vec3 direction_from_angles(double azimuth_deg, double elevation_deg);

/// Angle between two nonzero vectors in degrees (atan2 form, accurate near 0).
double angle_between_deg(const Vec3& a, const Vec3& b);

/// Gain (dB) towards `direction` for an antenna with the given orientation.
/// Throws ZeroDirection for a zero vector.
double gain_at(const AntennaPattern& pattern, const Orientation& orientation, const Vec3& direction);
double gain_at(const AntennaPattern& pattern, const Vec3& boresight, const Vec3& direction);

/// The eight (HPBW, FNBW) pairs of the evaluated dataset: four narrow
/// followed by four wide, with the peak set to the shape directivity.
std::vector<AntennaPattern> default_patterns(double floor_db = -30.0);
inline constexpr int kNarrowPatternCount = 4;

/// 10 log10(4 pi / integral of the linear shape over the sphere) for an
/// axisymmetric linear-gain shape g(psi), psi in radians on [0, pi].
/// `breakpoints` (radians) mark kinks/discontinuities; the integral is
/// refined by interval doubling until two successive results agree within
/// `tolerance_db`, else QuadratureNonConvergence.
double directivity_db(const std::function<double(double)>& shape_linear, std::vector<double> breakpoints = {},
                      double tolerance_db = 1e-4);

/// Directivity of the pattern's shape (its peak treated as 0 dB).
double peak_gain_from_directivity(const AntennaPattern& pattern);

}  // namespace rmgen

#endif  // RMGEN_ANTENNA_HPP
