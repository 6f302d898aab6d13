#ifndef RMGEN_PROPAGATION_HPP
#define RMGEN_PROPAGATION_HPP

#include "rmgen/scene.hpp"
#include "rmgen/tx.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rmgen {

struct SimParams {
    double frequency_hz = 3.7e9;
    int max_reflections = 2;
    int max_diffractions = 1;
    int max_transmissions = 0;
    double noise_floor_db = -127.0;
    double max_pl_db = -50.0;
    double vegetation_alpha_db_per_m = 1.0;
    double reflection_loss_db = 6.0;
    double rx_height_m = 1.5;

    double wavelength() const { return kSpeedOfLight / frequency_hz; }

    /// Throws ConfigError when a field is out of its domain.
    void validate() const;

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

enum class PathKind { Direct, Reflect1, Reflect2, Diffract1 };
std::string to_string(PathKind kind);

struct RayPath {
    PathKind kind = PathKind::Direct;
    std::vector<Vec3> vertices;  ///< Tx, interaction points..., Rx
    double path_length = 0.0;
    double tx_gain_db = 0.0;
    double reflection_loss_db = 0.0;
    double diffraction_loss_db = 0.0;
    double vegetation_loss_db = 0.0;
    double power_db = 0.0;  ///< relative to the radiated power
};

/// Free-space path loss 20 log10(4 pi d / lambda) in dB.
template <typename Scalar>
Scalar fspl_db(Scalar distance, Scalar wavelength) {
    return Scalar(20) * std::log10(Scalar(4 * kPi) * distance / wavelength);
}

/// Single knife-edge loss J(nu) in dB; zero for nu <= -0.78.
template <typename Scalar>
Scalar knife_edge_loss_db(Scalar nu) {
    if (nu <= Scalar(-0.78)) return Scalar(0);
    const Scalar v = nu - Scalar(0.1);
    return Scalar(6.9) + Scalar(20) * std::log10(std::sqrt(v * v + Scalar(1)) + v);
}

/// Fresnel-Kirchhoff parameter for an edge `h` above the line of sight at
/// distances d1, d2 from the two ends.
template <typename Scalar>
Scalar fresnel_parameter(Scalar h, Scalar d1, Scalar d2, Scalar wavelength) {
    return h * std::sqrt(Scalar(2) * (d1 + d2) / (wavelength * d1 * d2));
}

/// Linear vegetation attenuation along a polyline: alpha times the length
/// spent inside vegetation columns [0, veg height].
double vegetation_loss_db(const Scene& scene, std::span<const Vec3> polyline, double alpha_db_per_m);

std::optional<RayPath> trace_direct(const Scene& scene, const TxConfig& tx, const Vec3& rx, const SimParams& params);

/// A specular reflector: a vertical wall face or the ground plane z = 0.
struct Reflector {
    bool ground = false;
    VerticalFace face;  ///< unused for the ground

    Vec3 normal() const { return ground ? Vec3(0, 0, 1) : face.normal(); }
    double signed_distance(const Vec3& p) const;
    Vec3 mirror(const Vec3& p) const { return p - 2.0 * signed_distance(p) * normal(); }
};

/// Joins collinear faces with identical vertical extent and normal that
/// share an edge. The reflecting surface is unchanged.
std::vector<VerticalFace> merge_coplanar_faces(std::vector<VerticalFace> faces);

/// Merged wall faces followed by the ground plane.
std::vector<Reflector> build_reflectors(const Scene& scene);

/// Image-method tracer for one Tx. First- and second-order images are
/// built once; `trace` then validates them against a receiver.
class ImageTracer {
public:
    ImageTracer(const Scene& scene, const TxConfig& tx, std::vector<Reflector> reflectors, int max_order);

    std::vector<RayPath> trace(const Vec3& rx, const SimParams& params) const;

private:
    struct Image1 {
        int reflector;
        Vec3 image;
    };
    struct Image2 {
        int first, second;
        Vec3 image1, image2;
    };

    bool on_surface(const Reflector& r, const Vec3& q) const;
    RayPath finish(PathKind kind, std::vector<Vec3> vertices, int bounces, const SimParams& params) const;

    const Scene& scene_;
    const TxConfig& tx_;
    std::vector<Reflector> reflectors_;
    std::vector<Image1> first_;
    std::vector<Image2> second_;
};

std::vector<RayPath> trace_reflections(const Scene& scene, const TxConfig& tx, const Vec3& rx,
                                       const std::vector<Reflector>& reflectors, const SimParams& params);

/// Knife-edge diffraction over the dominant obstruction (largest Fresnel
/// parameter) in the vertical plane through Tx and Rx. Empty when nothing
/// rises above the direct line.
std::optional<RayPath> trace_diffraction(const Scene& scene, const TxConfig& tx, const Vec3& rx,
                                         const SimParams& params);

/// Non-coherent sum 10 log10(sum 10^(p/10)). Throws EmptyPathSet.
double combine_powers_db(std::span<const double> powers_db);
double combine_paths(std::span<const RayPath> paths);

/// Path loss (dB) to the [0, 1] gray scale: noise floor -> 0, max -> 1.
double gray_from_db(double pl_db, double noise_floor_db = -127.0, double max_pl_db = -50.0);
double db_from_gray(double gray, double noise_floor_db = -127.0, double max_pl_db = -50.0);

struct RadioMap {
    RasterF pl_db;  ///< -inf where no path arrives
    RasterF gray;
    TxConfig tx;
    SimParams params;
};

/// Full map: direct (or, if blocked, diffracted) path plus reflections per
/// pixel, combined non-coherently. Receivers inside a building column get
/// no paths. Throws TxOutOfBounds.
RadioMap simulate_radio_map(const Scene& scene, const TxConfig& tx, const SimParams& params, unsigned jobs = 1);

}  // namespace rmgen

#endif  // RMGEN_PROPAGATION_HPP
