#include "rmgen/features.hpp"

#include "rmgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rmgen {

namespace {

struct Ranges {
    ChannelBounds height, rel_height, gain, dist2d, dist3d, planar, angle_az, angle_el, fspl, x, y;
};

Ranges ranges_for(const GridGeometry& g, const FeatureBounds& b) {
    Ranges r;
    const double diag = g.diagonal();
    const double dist3d_max = std::hypot(diag, b.height_max);
    r.height = {0.0, b.height_max};
    r.rel_height = {-b.height_max, b.height_max};
    r.gain = {b.gain_min_db, b.gain_max_db};
    r.dist2d = {0.0, diag};
    r.dist3d = {0.0, dist3d_max};
    r.planar = {-diag, diag};
    r.angle_az = {-180.0, 180.0};
    r.angle_el = {-90.0, 90.0};
    r.fspl = {b.gain_min_db - 20.0 * std::log10(std::max(1.0, dist3d_max)), b.gain_max_db};
    r.x = {0.0, g.extent_x()};
    r.y = {0.0, g.extent_y()};
    return r;
}

// Fills a raster from f(row, col, pixel centre).
template <typename F>
RasterF per_pixel(const GridGeometry& g, F&& f) {
    RasterF out(g.height, g.width);
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col) out(row, col) = static_cast<float>(f(row, col, g.cell_center(row, col)));
    return out;
}

double horizontal_distance(const TxConfig& tx, const Vec2& p) { return (p - tx.position.head<2>()).norm(); }

double gain_towards(const TxConfig& tx, const Vec2& p, double z) {
    const Vec3 d(p.x() - tx.position.x(), p.y() - tx.position.y(), z - tx.position.z());
    if (d.squaredNorm() == 0.0) return tx.pattern.peak_db;
    return gain_at(tx.pattern, tx.orientation, d);
}

double elevation_deg(const TxConfig& tx, const Vec2& p, double z) {
    return rad2deg(std::atan2(z - tx.position.z(), horizontal_distance(tx, p)));
}

double distance3d(const TxConfig& tx, const Vec2& p, double z) {
    return std::hypot(horizontal_distance(tx, p), z - tx.position.z());
}

double fspl_towards(const TxConfig& tx, const Vec2& p, double z) {
    return gain_towards(tx, p, z) - 20.0 * std::log10(std::max(1.0, distance3d(tx, p, z)));
}

// Tx-centred coordinates with the first axis along the boresight azimuth.
Vec2 boresight_frame(const TxConfig& tx, const Vec2& p) {
    double s, c;
    sincos_deg(tx.orientation.azimuth_deg, s, c);
    const double dx = p.x() - tx.position.x();
    const double dy = p.y() - tx.position.y();
    return {dx * c + dy * s, -dx * s + dy * c};
}

FeatureStack height_relative(const Scene& scene, const TxConfig& tx, const Ranges& r) {
    const GridGeometry g = scene.geometry();
    const double z = tx.position.z();
    FeatureStack s;
    s.append({"build_rel", per_pixel(g, [&](int row, int col, const Vec2&) { return scene.building(row, col) - z; }),
              r.rel_height});
    s.append({"veg_rel", per_pixel(g, [&](int row, int col, const Vec2&) { return scene.vegetation(row, col) - z; }),
              r.rel_height});
    s.append({"floor_rel", RasterF::Constant(g.height, g.width, static_cast<float>(-z)), r.rel_height});
    return s;
}

}  // namespace

bool FeatureStack::contains(const std::string& name) const {
    return std::any_of(channels.begin(), channels.end(), [&](const Channel& c) { return c.name == name; });
}

const Channel& FeatureStack::at(const std::string& name) const {
    for (const Channel& c : channels)
        if (c.name == name) return c;
    throw ConfigError("unknown channel '" + name + "'");
}

std::vector<std::string> FeatureStack::names() const {
    std::vector<std::string> out;
    for (const Channel& c : channels) out.push_back(c.name);
    return out;
}

void FeatureStack::append(Channel channel) {
    if (contains(channel.name)) throw ConfigError("duplicate channel '" + channel.name + "'");
    if (!channels.empty() && (channel.values.rows() != channels.front().values.rows() ||
                              channel.values.cols() != channels.front().values.cols()))
        throw DimensionMismatch("channel '" + channel.name + "' does not match the stack grid");
    channels.push_back(std::move(channel));
}

void FeatureStack::merge(const FeatureStack& other) {
    if (!channels.empty() && normalized != other.normalized)
        throw ConfigError("cannot merge normalized and raw stacks");
    normalized = other.normalized;
    for (const Channel& c : other.channels)
        if (!contains(c.name)) append(c);
}

FeatureStack basic_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    const Ranges r = ranges_for(g, bounds);
    FeatureStack s;
    RasterF onehot = RasterF::Zero(g.height, g.width);
    onehot(g.row_of(tx.position.y()), g.col_of(tx.position.x())) = static_cast<float>(tx.position.z());
    s.append({"tx_onehot", std::move(onehot), r.height});
    s.append({"build_ndsm", scene.buildings().values(), r.height});
    s.append({"veg_ndsm", scene.vegetation().values(), r.height});
    s.append({"gain_floor", per_pixel(g, [&](int, int, const Vec2& p) { return gain_towards(tx, p, 0.0); }), r.gain});
    s.append({"gain_top",
              per_pixel(g, [&](int row, int col, const Vec2& p) { return gain_towards(tx, p, scene.building(row, col)); }),
              r.gain});
    return s;
}

FeatureStack grid_anchor(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    FeatureStack s;
    for (const char* name : {"tx_x", "tx_y", "tx_z", "pixel_x", "pixel_y"}) s.append(frame_channel(name, g, tx, bounds));
    return s;
}

FeatureStack cylindrical_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    FeatureStack s;
    s.append(frame_channel("dist2d", g, tx, bounds));
    s.append(frame_channel("azimuth", g, tx, bounds));
    s.merge(height_relative(scene, tx, ranges_for(g, bounds)));
    return s;
}

FeatureStack euclidean_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    FeatureStack s;
    s.append(frame_channel("dx", g, tx, bounds));
    s.append(frame_channel("dy", g, tx, bounds));
    s.merge(height_relative(scene, tx, ranges_for(g, bounds)));
    return s;
}

FeatureStack spherical_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    const Ranges r = ranges_for(g, bounds);
    FeatureStack s;
    s.append(frame_channel("azimuth", g, tx, bounds));

    // Building and vegetation channels use the lower bound where the object
    // is absent.
    auto elevation = [&](auto&& height_at, bool object) {
        return per_pixel(g, [&](int row, int col, const Vec2& p) {
            const double h = height_at(row, col);
            if (object && h <= 0.0) return r.angle_el.lo;
            return elevation_deg(tx, p, h);
        });
    };
    auto dist = [&](auto&& height_at, bool object) {
        return per_pixel(g, [&](int row, int col, const Vec2& p) {
            const double h = height_at(row, col);
            if (object && h <= 0.0) return r.dist3d.lo;
            return distance3d(tx, p, h);
        });
    };
    auto ground = [](int, int) { return 0.0; };
    auto build = [&](int row, int col) { return scene.building(row, col); };
    auto veg = [&](int row, int col) { return scene.vegetation(row, col); };

    s.append({"elevation_ground", elevation(ground, false), r.angle_el});
    s.append({"elevation_build", elevation(build, true), r.angle_el});
    s.append({"elevation_veg", elevation(veg, true), r.angle_el});
    s.append({"dist3d_ground", dist(ground, false), r.dist3d});
    s.append({"dist3d_build", dist(build, true), r.dist3d});
    s.append({"dist3d_veg", dist(veg, true), r.dist3d});
    return s;
}

std::vector<double> slice_heights(double step, double top) {
    if (!(step > 0.0)) throw PreconditionViolation("slice step must be positive");
    std::vector<double> out;
    for (int i = 0; i * step <= top + 1e-9; ++i) out.push_back(i * step);
    return out;
}

std::string slice_name(const std::string& prefix, double height) {
    std::ostringstream s;
    s << prefix << "_slice_" << height << "m";
    return s.str();
}

FeatureStack gain_slices(const Scene& scene, const TxConfig& tx, const std::vector<double>& heights,
                         const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    const Ranges r = ranges_for(g, bounds);
    FeatureStack s;
    for (double h : heights)
        s.append({slice_name("gain", h), per_pixel(g, [&](int, int, const Vec2& p) { return gain_towards(tx, p, h); }),
                  r.gain});
    return s;
}

FeatureStack fspl_features(const Scene& scene, const TxConfig& tx, FsplVariant variant,
                           const std::vector<double>& heights, const FeatureBounds& bounds) {
    require_tx_inside(scene, tx);
    const GridGeometry g = scene.geometry();
    const Ranges r = ranges_for(g, bounds);
    FeatureStack s;
    if (variant == FsplVariant::Slices) {
        for (double h : heights)
            s.append({slice_name("fspl", h), per_pixel(g, [&](int, int, const Vec2& p) { return fspl_towards(tx, p, h); }),
                      r.fspl});
        return s;
    }
    s.append({"fspl_floor", per_pixel(g, [&](int, int, const Vec2& p) { return fspl_towards(tx, p, 0.0); }), r.fspl});
    if (variant == FsplVariant::FloorTop)
        s.append({"fspl_top",
                  per_pixel(g, [&](int row, int col, const Vec2& p) { return fspl_towards(tx, p, scene.building(row, col)); }),
                  r.fspl});
    return s;
}

FeatureStack los_features(const Scene& scene, const TxConfig& tx, LosVariant variant, LosFrame frame, double ceiling,
                          const FeatureBounds& bounds) {
    return los_features(compute_los(scene, tx, ceiling), scene.geometry(), tx, variant, frame, ceiling, bounds);
}

FeatureStack los_features(const LosMaps& maps, const GridGeometry& g, const TxConfig& tx, LosVariant variant,
                          LosFrame frame, double ceiling, const FeatureBounds& bounds) {
    FeatureStack s;
    if (variant == LosVariant::Binary) {
        s.append({"los_ground", maps.ground, {0.0, 1.0}});
        s.append({"los_top", maps.top, {0.0, 1.0}});
        return s;
    }
    const double span = std::max(bounds.height_max, ceiling);
    const double z = tx.position.z();
    switch (frame) {
        case LosFrame::Absolute:
            s.append({"los_min", maps.min_visible, {0.0, span}});
            break;
        case LosFrame::Relative:
            s.append({"los_min_rel",
                      per_pixel(g, [&](int row, int col, const Vec2&) { return maps.min_visible(row, col) - z; }),
                      {-span, span}});
            break;
        case LosFrame::Spherical:
            s.append({"los_min_elev", per_pixel(g, [&](int row, int col, const Vec2& p) {
                          return elevation_deg(tx, p, maps.min_visible(row, col));
                      }),
                      {-90.0, 90.0}});
            break;
    }
    return s;
}

FeatureStack aerial_features(const Scene& scene) {
    FeatureStack s;
    if (!scene.aerial()) return s;
    const AerialImage& img = *scene.aerial();
    const char* names[4] = {"aerial_r", "aerial_g", "aerial_b", "aerial_ir"};
    for (int ch = 0; ch < 4; ++ch) {
        RasterF v(img.height, img.width);
        for (int row = 0; row < img.height; ++row)
            for (int col = 0; col < img.width; ++col) v(row, col) = img.at(row, col, ch);
        s.append({names[ch], std::move(v), {0.0, 255.0}});
    }
    return s;
}

FeatureStack normalize(const FeatureStack& stack) {
    if (stack.normalized) return stack;
    FeatureStack out;
    out.normalized = true;
    for (const Channel& c : stack.channels) {
        const ChannelBounds& b = c.bounds;
        if (!(b.hi > b.lo)) throw NormalizationRange("channel '" + c.name + "' has empty bounds");
        RasterF n(c.values.rows(), c.values.cols());
        for (Eigen::Index i = 0; i < c.values.size(); ++i) {
            const double v = c.values.data()[i];
            const float x = static_cast<float>((v - b.offset()) / b.scale() - 1.0);
            if (!(x >= -1.0f && x <= 1.0f)) {
                std::ostringstream msg;
                msg << "channel '" << c.name << "' value " << v << " outside [" << b.lo << ", " << b.hi << "]";
                throw NormalizationRange(msg.str());
            }
            n.data()[i] = x;
        }
        out.channels.push_back({c.name, std::move(n), b});
    }
    return out;
}

FeatureStack denormalize(const FeatureStack& stack) {
    if (!stack.normalized) return stack;
    FeatureStack out;
    for (const Channel& c : stack.channels) {
        RasterF v = ((c.values.cast<double>() + 1.0) * c.bounds.scale() + c.bounds.offset()).cast<float>();
        out.channels.push_back({c.name, std::move(v), c.bounds});
    }
    return out;
}

bool is_frame_dependent(const std::string& name) {
    static const char* kNames[] = {"azimuth", "dx", "dy", "tx_x", "tx_y", "pixel_x", "pixel_y"};
    return std::any_of(std::begin(kNames), std::end(kNames), [&](const char* n) { return name == n; });
}

Channel frame_channel(const std::string& name, const GridGeometry& g, const TxConfig& tx, const FeatureBounds& bounds) {
    const Ranges r = ranges_for(g, bounds);
    auto constant = [&](double v) { return RasterF::Constant(g.height, g.width, static_cast<float>(v)); };
    if (name == "tx_x") return {name, constant(tx.position.x()), r.x};
    if (name == "tx_y") return {name, constant(tx.position.y()), r.y};
    if (name == "tx_z") return {name, constant(tx.position.z()), r.height};
    if (name == "pixel_x") return {name, per_pixel(g, [](int, int, const Vec2& p) { return p.x(); }), r.x};
    if (name == "pixel_y") return {name, per_pixel(g, [](int, int, const Vec2& p) { return p.y(); }), r.y};
    if (name == "dist2d")
        return {name, per_pixel(g, [&](int, int, const Vec2& p) { return horizontal_distance(tx, p); }), r.dist2d};
    if (name == "azimuth")
        return {name, per_pixel(g, [&](int, int, const Vec2& p) { return relative_azimuth_deg(tx, p); }), r.angle_az};
    if (name == "dx") return {name, per_pixel(g, [&](int, int, const Vec2& p) { return boresight_frame(tx, p).x(); }), r.planar};
    if (name == "dy") return {name, per_pixel(g, [&](int, int, const Vec2& p) { return boresight_frame(tx, p).y(); }), r.planar};
    throw ConfigError("'" + name + "' is not a geometry channel");
}

}  // namespace rmgen

namespace rmgen {

std::vector<std::string> known_feature_sets() {
    return {"basic", "grid_anchor", "cylindrical", "euclidean", "spherical", "gain_slices", "fspl", "los", "aerial"};
}

void FeatureConfig::validate() const {
    const auto known = known_feature_sets();
    for (const std::string& s : sets)
        if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("unknown feature set '" + s + "'");
    if (!(slice_step_m > 0.0) || slice_top_m < 0.0) throw ConfigError("slice heights need step > 0 and top >= 0");
    if (!(los_ceiling_m > 0.0)) throw ConfigError("LoS ceiling must be positive");
}

FeatureStack build_features(const Scene& scene, const TxConfig& tx, const FeatureConfig& config, const LosMaps* los) {
    config.validate();
    const auto has = [&](const char* name) {
        return std::find(config.sets.begin(), config.sets.end(), name) != config.sets.end();
    };
    const FeatureBounds& b = config.bounds;
    FeatureStack s;
    if (has("basic")) s.merge(basic_features(scene, tx, b));
    if (has("grid_anchor")) s.merge(grid_anchor(scene, tx, b));
    if (has("cylindrical")) s.merge(cylindrical_features(scene, tx, b));
    if (has("euclidean")) s.merge(euclidean_features(scene, tx, b));
    if (has("spherical")) s.merge(spherical_features(scene, tx, b));
    const auto heights = slice_heights(config.slice_step_m, config.slice_top_m);
    if (has("gain_slices")) s.merge(gain_slices(scene, tx, heights, b));
    if (has("fspl")) s.merge(fspl_features(scene, tx, config.fspl_variant, heights, b));
    if (has("los")) {
        if (los)
            s.merge(los_features(*los, scene.geometry(), tx, config.los_variant, config.los_frame, config.los_ceiling_m, b));
        else
            s.merge(los_features(scene, tx, config.los_variant, config.los_frame, config.los_ceiling_m, b));
    }
    if (has("aerial")) s.merge(aerial_features(scene));
    return config.normalize ? normalize(s) : s;
}

}  // namespace rmgen
