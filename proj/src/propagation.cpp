#include "rmgen/propagation.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/parallel.hpp"
#include "rmgen/traversal.hpp"
#include "rmgen/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace rmgen {

namespace {

constexpr double kSideEps = 1e-9;     // meters in front of a reflector
constexpr double kBoundsEps = 1e-9;   // slack on face bounds

auto building_height(const Scene& scene) {
    return [&scene](int row, int col) { return scene.building(row, col); };
}

}  // namespace

void SimParams::validate() const {
    if (!(frequency_hz > 0.0)) throw ConfigError("frequency must be positive");
    if (max_reflections < 0 || max_reflections > 2) throw ConfigError("max_reflections must be 0, 1 or 2");
    if (max_diffractions < 0 || max_diffractions > 1) throw ConfigError("max_diffractions must be 0 or 1");
    if (max_transmissions != 0) throw ConfigError("transmissions are not modelled; max_transmissions must be 0");
    if (!(noise_floor_db < max_pl_db && max_pl_db < 0.0)) throw ConfigError("need noise_floor < max_pl < 0");
    if (!(vegetation_alpha_db_per_m >= 0.0)) throw ConfigError("vegetation alpha must be >= 0");
    if (!(reflection_loss_db >= 0.0)) throw ConfigError("reflection loss must be >= 0");
    if (!(rx_height_m >= 0.0)) throw ConfigError("rx height must be >= 0");
}

std::string to_string(PathKind kind) {
    switch (kind) {
        case PathKind::Direct: return "direct";
        case PathKind::Reflect1: return "reflect1";
        case PathKind::Reflect2: return "reflect2";
        case PathKind::Diffract1: return "diffract1";
    }
    return "unknown";
}

double vegetation_loss_db(const Scene& scene, std::span<const Vec3> polyline, double alpha_db_per_m) {
    if (alpha_db_per_m == 0.0) return 0.0;
    const GridGeometry g = scene.geometry();
    double inside = 0.0;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec3& p = polyline[i];
        const Vec3& q = polyline[i + 1];
        const double seg_length = (q - p).norm();
        traverse_cells(g, p.head<2>(), q.head<2>(), [&](int row, int col, double t0, double t1) {
            const double v = scene.vegetation(row, col);
            if (v <= 0.0) return true;
            const double za = std::lerp(p.z(), q.z(), t0);
            const double zb = std::lerp(p.z(), q.z(), t1);
            double frac;  // share of [t0, t1] with z < v
            if (za < v && zb < v) {
                frac = 1.0;
            } else if (za >= v && zb >= v) {
                frac = 0.0;
            } else {
                const double cross = (v - za) / (zb - za);
                frac = za < v ? cross : 1.0 - cross;
            }
            inside += frac * (t1 - t0) * seg_length;
            return true;
        });
    }
    return alpha_db_per_m * inside;
}

std::optional<RayPath> trace_direct(const Scene& scene, const TxConfig& tx, const Vec3& rx, const SimParams& params) {
    if (!segment_clear(scene.geometry(), tx.position, rx, building_height(scene))) return std::nullopt;
    RayPath path;
    path.kind = PathKind::Direct;
    path.vertices = {tx.position, rx};
    path.path_length = (rx - tx.position).norm();
    path.tx_gain_db = path.path_length > 0.0 ? gain_at(tx.pattern, tx.orientation, rx - tx.position) : tx.pattern.peak_db;
    path.vegetation_loss_db = vegetation_loss_db(scene, path.vertices, params.vegetation_alpha_db_per_m);
    path.power_db = path.tx_gain_db - fspl_db(path.path_length, params.wavelength()) - path.vegetation_loss_db;
    return path;
}

double Reflector::signed_distance(const Vec3& p) const {
    if (ground) return p.z();
    const double coord = face.axis == VerticalFace::Axis::X ? p.x() : p.y();
    return (coord - face.plane) * face.normal_sign;
}

std::vector<VerticalFace> merge_coplanar_faces(std::vector<VerticalFace> faces) {
    auto key = [](const VerticalFace& f) { return std::tuple(f.axis, f.plane, f.normal_sign, f.z0, f.z1, f.lo); };
    std::sort(faces.begin(), faces.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<VerticalFace> merged;
    for (const VerticalFace& f : faces) {
        if (!merged.empty()) {
            VerticalFace& m = merged.back();
            if (m.axis == f.axis && m.plane == f.plane && m.normal_sign == f.normal_sign && m.z0 == f.z0 &&
                m.z1 == f.z1 && m.hi == f.lo) {
                m.hi = f.hi;
                continue;
            }
        }
        merged.push_back(f);
    }
    return merged;
}

std::vector<Reflector> build_reflectors(const Scene& scene) {
    std::vector<Reflector> out;
    for (const VerticalFace& f : merge_coplanar_faces(extract_wall_faces(scene))) out.push_back({false, f});
    out.push_back({true, {}});
    return out;
}

ImageTracer::ImageTracer(const Scene& scene, const TxConfig& tx, std::vector<Reflector> reflectors, int max_order)
    : scene_(scene), tx_(tx), reflectors_(std::move(reflectors)) {
    if (max_order < 1) return;
    const Vec3& p = tx.position;
    for (int i = 0; i < static_cast<int>(reflectors_.size()); ++i) {
        if (reflectors_[i].signed_distance(p) > kSideEps) first_.push_back({i, reflectors_[i].mirror(p)});
    }
    if (max_order < 2) return;
    for (const Image1& a : first_) {
        for (int j = 0; j < static_cast<int>(reflectors_.size()); ++j) {
            if (j == a.reflector) continue;
            const Reflector& r = reflectors_[j];
            if (r.signed_distance(a.image) > kSideEps) second_.push_back({a.reflector, j, a.image, r.mirror(a.image)});
        }
    }
}

bool ImageTracer::on_surface(const Reflector& r, const Vec3& q) const {
    const GridGeometry g = scene_.geometry();
    if (r.ground) {
        if (!g.contains(q.x(), q.y())) return false;
        return scene_.building(g.row_of(q.y()), g.col_of(q.x())) <= 0.0;
    }
    const VerticalFace& f = r.face;
    const double along = f.axis == VerticalFace::Axis::X ? q.y() : q.x();
    return along >= f.lo - kBoundsEps && along <= f.hi + kBoundsEps && q.z() >= f.z0 - kBoundsEps &&
           q.z() <= f.z1 + kBoundsEps;
}

RayPath ImageTracer::finish(PathKind kind, std::vector<Vec3> vertices, int bounces, const SimParams& params) const {
    RayPath path;
    path.kind = kind;
    path.vertices = std::move(vertices);
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
        path.path_length += (path.vertices[i + 1] - path.vertices[i]).norm();
    path.tx_gain_db = gain_at(tx_.pattern, tx_.orientation, path.vertices[1] - path.vertices[0]);
    path.reflection_loss_db = bounces * params.reflection_loss_db;
    path.vegetation_loss_db = vegetation_loss_db(scene_, path.vertices, params.vegetation_alpha_db_per_m);
    path.power_db = path.tx_gain_db - fspl_db(path.path_length, params.wavelength()) - path.reflection_loss_db -
                    path.vegetation_loss_db;
    return path;
}

std::vector<RayPath> ImageTracer::trace(const Vec3& rx, const SimParams& params) const {
    std::vector<RayPath> out;
    const GridGeometry g = scene_.geometry();
    const auto height = building_height(scene_);
    const Vec3& tx = tx_.position;

    // Point where the segment from `front` (in front of r) to `back` meets r.
    auto hit = [](const Reflector& r, const Vec3& front, const Vec3& back) {
        const double a = r.signed_distance(front);
        const double b = r.signed_distance(back);
        return Vec3(front + (back - front) * (a / (a - b)));
    };

    for (const Image1& im : first_) {
        const Reflector& r = reflectors_[im.reflector];
        if (r.signed_distance(rx) <= kSideEps) continue;
        const Vec3 q = hit(r, rx, im.image);
        if (!on_surface(r, q)) continue;
        if (!segment_clear(g, tx, q, height) || !segment_clear(g, q, rx, height)) continue;
        out.push_back(finish(PathKind::Reflect1, {tx, q, rx}, 1, params));
    }

    for (const Image2& im : second_) {
        const Reflector& r1 = reflectors_[im.first];
        const Reflector& r2 = reflectors_[im.second];
        if (r2.signed_distance(rx) <= kSideEps) continue;
        const Vec3 q2 = hit(r2, rx, im.image2);
        if (!on_surface(r2, q2) || r1.signed_distance(q2) <= kSideEps) continue;
        const Vec3 q1 = hit(r1, q2, im.image1);
        if (!on_surface(r1, q1) || r2.signed_distance(q1) <= kSideEps) continue;
        if (!segment_clear(g, tx, q1, height) || !segment_clear(g, q1, q2, height) ||
            !segment_clear(g, q2, rx, height))
            continue;
        out.push_back(finish(PathKind::Reflect2, {tx, q1, q2, rx}, 2, params));
    }
    return out;
}

std::vector<RayPath> trace_reflections(const Scene& scene, const TxConfig& tx, const Vec3& rx,
                                       const std::vector<Reflector>& reflectors, const SimParams& params) {
    return ImageTracer(scene, tx, reflectors, params.max_reflections).trace(rx, params);
}

std::optional<RayPath> trace_diffraction(const Scene& scene, const TxConfig& tx, const Vec3& rx,
                                         const SimParams& params) {
    const Vec3& p = tx.position;
    const double length = (rx - p).norm();
    const double lambda = params.wavelength();

    double best_nu = -std::numeric_limits<double>::infinity();
    double best_t = 0.0, best_h = 0.0;
    auto consider = [&](double t, double h) {
        if (t <= 0.0 || t >= 1.0) return;
        const double excess = h - std::lerp(p.z(), rx.z(), t);
        if (excess <= 0.0) return;
        const double nu = fresnel_parameter(excess, t * length, (1.0 - t) * length, lambda);
        if (nu > best_nu) {
            best_nu = nu;
            best_t = t;
            best_h = h;
        }
    };
    traverse_cells(scene.geometry(), p.head<2>(), rx.head<2>(), [&](int row, int col, double t0, double t1) {
        const double h = scene.building(row, col);
        if (h > 0.0) {
            consider(t0, h);
            consider(t1, h);
        }
        return true;
    });
    if (!std::isfinite(best_nu)) return std::nullopt;

    const Vec2 edge_xy = p.head<2>() + best_t * (rx.head<2>() - p.head<2>());
    const Vec3 edge(edge_xy.x(), edge_xy.y(), best_h);

    RayPath path;
    path.kind = PathKind::Diffract1;
    path.vertices = {p, edge, rx};
    path.path_length = (edge - p).norm() + (rx - edge).norm();
    path.tx_gain_db = gain_at(tx.pattern, tx.orientation, edge - p);
    path.diffraction_loss_db = knife_edge_loss_db(best_nu);
    path.vegetation_loss_db = vegetation_loss_db(scene, path.vertices, params.vegetation_alpha_db_per_m);
    path.power_db = path.tx_gain_db - fspl_db(path.path_length, lambda) - path.diffraction_loss_db -
                    path.vegetation_loss_db;
    return path;
}

double combine_powers_db(std::span<const double> powers_db) {
    if (powers_db.empty()) throw EmptyPathSet("no paths to combine");
    const double peak = *std::max_element(powers_db.begin(), powers_db.end());
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double p : powers_db) sum += std::pow(10.0, (p - peak) / 10.0);
    return peak + 10.0 * std::log10(sum);
}

double combine_paths(std::span<const RayPath> paths) {
    std::vector<double> powers;
    powers.reserve(paths.size());
    for (const RayPath& p : paths) powers.push_back(p.power_db);
    return combine_powers_db(powers);
}

double gray_from_db(double pl_db, double noise_floor_db, double max_pl_db) {
    return std::clamp((pl_db - noise_floor_db) / (max_pl_db - noise_floor_db), 0.0, 1.0);
}

double db_from_gray(double gray, double noise_floor_db, double max_pl_db) {
    return gray * (max_pl_db - noise_floor_db) + noise_floor_db;
}

RadioMap simulate_radio_map(const Scene& scene, const TxConfig& tx, const SimParams& params, unsigned jobs) {
    params.validate();
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();

    std::vector<Reflector> reflectors;
    if (params.max_reflections > 0) reflectors = build_reflectors(scene);
    const ImageTracer tracer(scene, tx, std::move(reflectors), params.max_reflections);

    RadioMap map;
    map.tx = tx;
    map.params = params;
    map.pl_db = RasterF::Constant(g.height, g.width, -std::numeric_limits<float>::infinity());
    map.gray = RasterF::Zero(g.height, g.width);

    parallel_for(static_cast<std::size_t>(g.height), jobs, [&](std::size_t r) {
        const int row = static_cast<int>(r);
        std::vector<RayPath> paths;
        for (int col = 0; col < g.width; ++col) {
            if (scene.building(row, col) > params.rx_height_m) continue;
            const Vec2 c = g.cell_center(row, col);
            const Vec3 rx(c.x(), c.y(), params.rx_height_m);

            paths.clear();
            if (auto direct = trace_direct(scene, tx, rx, params)) {
                paths.push_back(std::move(*direct));
            } else if (params.max_diffractions > 0) {
                if (auto diffracted = trace_diffraction(scene, tx, rx, params)) paths.push_back(std::move(*diffracted));
            }
            if (params.max_reflections > 0) {
                auto reflected = tracer.trace(rx, params);
                std::move(reflected.begin(), reflected.end(), std::back_inserter(paths));
            }
            if (paths.empty()) continue;

            const double pl = combine_paths(paths);
            map.pl_db(row, col) = static_cast<float>(pl);
            map.gray(row, col) = static_cast<float>(gray_from_db(pl, params.noise_floor_db, params.max_pl_db));
        }
    });
    return map;
}

}  // namespace rmgen
