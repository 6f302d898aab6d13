#include "rmgen/antenna.hpp"

#include "rmgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rmgen {

namespace {

// Composite Simpson on [a, b] with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

AntennaPattern AntennaPattern::make(double hpbw_deg, double fnbw_deg, double floor_db,
                                    std::optional<double> peak_db) {
    if (!(hpbw_deg > 0.0)) throw PreconditionViolation("hpbw must be positive");
    if (!(fnbw_deg > hpbw_deg)) throw PreconditionViolation("fnbw must exceed hpbw");
    if (fnbw_deg > 360.0) throw PreconditionViolation("fnbw must not exceed 360 degrees");
    if (!(floor_db < 0.0) || !std::isfinite(floor_db)) throw PreconditionViolation("floor must be finite and below 0 dB");
    AntennaPattern p;
    p.hpbw_deg = hpbw_deg;
    p.fnbw_deg = fnbw_deg;
    p.floor_db = floor_db;
    p.peak_db = peak_db ? *peak_db : peak_gain_from_directivity(p);
    return p;
}

std::string AntennaPattern::id() const {
    std::ostringstream s;
    s << "hpbw" << hpbw_deg << "_fnbw" << fnbw_deg;
    return s.str();
}

Vec3 direction_from_angles(double azimuth_deg, double elevation_deg) {
    double sa, ca, se, ce;
    sincos_deg(azimuth_deg, sa, ca);
    sincos_deg(elevation_deg, se, ce);
    return {ce * ca, ce * sa, se};
}

Vec3 Orientation::boresight() const { return direction_from_angles(azimuth_deg, tilt_deg); }

double angle_between_deg(const Vec3& a, const Vec3& b) {
    return rad2deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

double gain_at(const AntennaPattern& pattern, const Vec3& boresight, const Vec3& direction) {
    if (direction.squaredNorm() == 0.0) throw ZeroDirection("gain requested for a zero direction");
    return pattern.gain_offaxis(angle_between_deg(boresight, direction));
}

double gain_at(const AntennaPattern& pattern, const Orientation& orientation, const Vec3& direction) {
    return gain_at(pattern, orientation.boresight(), direction);
}

std::vector<AntennaPattern> default_patterns(double floor_db) {
    static constexpr double kPairs[8][2] = {{15, 30}, {15, 60}, {30, 60}, {45, 60},
                                            {15, 90}, {30, 90}, {45, 90}, {90, 120}};
    std::vector<AntennaPattern> out;
    out.reserve(8);
    for (const auto& pair : kPairs) out.push_back(AntennaPattern::make(pair[0], pair[1], floor_db));
    return out;
}

double directivity_db(const std::function<double(double)>& shape_linear, std::vector<double> breakpoints,
                      double tolerance_db) {
    breakpoints.push_back(0.0);
    breakpoints.push_back(kPi);
    std::erase_if(breakpoints, [](double b) { return b < 0.0 || b > kPi; });
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    // Discontinuities at breakpoints are handled by evaluating each piece
    // just inside its own interval.
    auto integral = [&](int n) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            const double a = breakpoints[i];
            const double b = breakpoints[i + 1];
            const double eps = (b - a) * 1e-12;
            auto f = [&](double psi) {
                const double x = std::clamp(psi, a + eps, b - eps);
                return shape_linear(x) * std::sin(psi);
            };
            total += simpson(f, a, b, n);
        }
        return 2.0 * kPi * total;
    };

    double previous = 10.0 * std::log10(4.0 * kPi / integral(16));
    for (int n = 32; n <= (1 << 20); n *= 2) {
        const double current = 10.0 * std::log10(4.0 * kPi / integral(n));
        if (std::abs(current - previous) < tolerance_db) return current;
        previous = current;
    }
    throw QuadratureNonConvergence("directivity integral did not settle");
}

double peak_gain_from_directivity(const AntennaPattern& pattern) {
    const double half_hpbw = pattern.hpbw_deg / 2.0;
    const double half_fnbw = pattern.fnbw_deg / 2.0;
    // Angle where the parabola meets the floor.
    const double psi_floor = half_hpbw * std::sqrt(pattern.floor_db / -3.0);
    auto shape = [&](double psi_rad) {
        const double s = main_lobe_shape_db(rad2deg(psi_rad), pattern.hpbw_deg, pattern.fnbw_deg, pattern.floor_db);
        return std::pow(10.0, s / 10.0);
    };
    std::vector<double> breaks{deg2rad(std::min(half_fnbw, 180.0))};
    if (psi_floor < half_fnbw) breaks.push_back(deg2rad(psi_floor));
    return directivity_db(shape, breaks, 1e-4);
}

}  // namespace rmgen
