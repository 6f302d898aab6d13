#include "rmgen/json_io.hpp"

#include "rmgen/errors.hpp"

#include <fstream>

namespace rmgen {

namespace fs = std::filesystem;

namespace {

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

// Wraps nlohmann type errors into ConfigError with the offending context.
template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& value) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << value.dump(2) << '\n';
    if (!out) throw Error("cannot write " + path.string());
}

Json pattern_to_json(const AntennaPattern& p) {
    return {{"hpbw_deg", p.hpbw_deg}, {"fnbw_deg", p.fnbw_deg}, {"floor_db", p.floor_db}, {"peak_db", p.peak_db}};
}

AntennaPattern pattern_from_json(const Json& j) {
    return guarded("pattern", [&] {
        std::optional<double> peak;
        const double floor = j.value("floor_db", -30.0);
        if (j.contains("peak_db") && !(j.at("peak_db").is_string() && j.at("peak_db").get<std::string>() == "auto"))
            peak = j.at("peak_db").get<double>();
        return AntennaPattern::make(j.at("hpbw_deg").get<double>(), j.at("fnbw_deg").get<double>(), floor, peak);
    });
}

Json tx_to_json(const TxConfig& tx) {
    return {{"scene_id", tx.scene_id},
            {"pattern_id", tx.pattern_id},
            {"position", {tx.position.x(), tx.position.y(), tx.position.z()}},
            {"orientation", {{"azimuth_deg", tx.orientation.azimuth_deg}, {"tilt_deg", tx.orientation.tilt_deg}}},
            {"pattern", pattern_to_json(tx.pattern)}};
}

TxConfig tx_from_json(const Json& j) {
    return guarded("tx", [&] {
        TxConfig tx;
        read_optional(j, "scene_id", tx.scene_id);
        const auto pos = j.at("position").get<std::vector<double>>();
        if (pos.size() != 3) throw ConfigError("tx: position needs three coordinates");
        tx.position = Vec3(pos[0], pos[1], pos[2]);
        const Json& o = j.at("orientation");
        tx.orientation = Orientation(o.at("azimuth_deg").get<double>(), o.value("tilt_deg", 0.0));
        tx.pattern = pattern_from_json(j.at("pattern"));
        tx.pattern_id = j.value("pattern_id", tx.pattern.id());
        return tx;
    });
}

std::vector<TxConfig> read_tx_list(const fs::path& path) {
    const Json j = read_json(path);
    if (!j.is_array()) throw ConfigError(path.string() + ": expected a list of tx records");
    std::vector<TxConfig> out;
    for (const Json& e : j) out.push_back(tx_from_json(e));
    return out;
}

void write_tx_list(const fs::path& path, const std::vector<TxConfig>& txs) {
    Json j = Json::array();
    for (const TxConfig& tx : txs) j.push_back(tx_to_json(tx));
    write_json(path, j);
}

Json params_to_json(const SimParams& p) {
    return {{"frequency_hz", p.frequency_hz},
            {"max_reflections", p.max_reflections},
            {"max_diffractions", p.max_diffractions},
            {"max_transmissions", p.max_transmissions},
            {"noise_floor_db", p.noise_floor_db},
            {"max_pl_db", p.max_pl_db},
            {"vegetation_alpha_db_per_m", p.vegetation_alpha_db_per_m},
            {"reflection_loss_db", p.reflection_loss_db},
            {"rx_height_m", p.rx_height_m}};
}

SimParams params_from_json(const Json& j) {
    SimParams p = guarded("sim_params", [&] {
        SimParams p;
        read_optional(j, "frequency_hz", p.frequency_hz);
        read_optional(j, "max_reflections", p.max_reflections);
        read_optional(j, "max_diffractions", p.max_diffractions);
        read_optional(j, "max_transmissions", p.max_transmissions);
        read_optional(j, "noise_floor_db", p.noise_floor_db);
        read_optional(j, "max_pl_db", p.max_pl_db);
        read_optional(j, "vegetation_alpha_db_per_m", p.vegetation_alpha_db_per_m);
        read_optional(j, "reflection_loss_db", p.reflection_loss_db);
        read_optional(j, "rx_height_m", p.rx_height_m);
        return p;
    });
    p.validate();
    return p;
}

Json grid_to_json(const GridGeometry& g) {
    return {{"width", g.width}, {"height", g.height}, {"resolution_m", g.resolution}};
}

GridGeometry grid_from_json(const Json& j) {
    return guarded("grid", [&] {
        return GridGeometry{j.at("width").get<int>(), j.at("height").get<int>(), j.at("resolution_m").get<double>()};
    });
}

Json bounds_to_json(const FeatureBounds& b) {
    return {{"height_max", b.height_max}, {"gain_min_db", b.gain_min_db}, {"gain_max_db", b.gain_max_db}};
}

FeatureBounds bounds_from_json(const Json& j) {
    return guarded("normalization", [&] {
        FeatureBounds b;
        read_optional(j, "height_max", b.height_max);
        read_optional(j, "gain_min_db", b.gain_min_db);
        read_optional(j, "gain_max_db", b.gain_max_db);
        if (!(b.height_max > 0.0) || !(b.gain_max_db > b.gain_min_db))
            throw ConfigError("normalization: empty bounds");
        return b;
    });
}

}  // namespace rmgen
