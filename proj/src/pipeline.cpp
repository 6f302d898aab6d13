#include "rmgen/pipeline.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/parallel.hpp"
#include "rmgen/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace rmgen {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCompleteMarker = ".complete";
constexpr std::uint64_t kPlacementStream = 1u << 20;

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(context + ": unknown key '" + key + "'");
}

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

const char* fspl_name(FsplVariant v) {
    switch (v) {
        case FsplVariant::Floor: return "floor";
        case FsplVariant::FloorTop: return "floor_top";
        case FsplVariant::Slices: return "slices";
    }
    return "";
}
FsplVariant fspl_from(const std::string& s) {
    for (FsplVariant v : {FsplVariant::Floor, FsplVariant::FloorTop, FsplVariant::Slices})
        if (s == fspl_name(v)) return v;
    throw ConfigError("unknown fspl variant '" + s + "'");
}

const char* los_frame_name(LosFrame f) {
    switch (f) {
        case LosFrame::Absolute: return "absolute";
        case LosFrame::Relative: return "relative";
        case LosFrame::Spherical: return "spherical";
    }
    return "";
}
LosFrame los_frame_from(const std::string& s) {
    for (LosFrame f : {LosFrame::Absolute, LosFrame::Relative, LosFrame::Spherical})
        if (s == los_frame_name(f)) return f;
    throw ConfigError("unknown LoS frame '" + s + "'");
}

LosVariant los_variant_from(const std::string& s) {
    if (s == "binary") return LosVariant::Binary;
    if (s == "ours") return LosVariant::Ours;
    throw ConfigError("unknown LoS variant '" + s + "'");
}

bool is_reference_set(const std::vector<AntennaPattern>& patterns) {
    return patterns == default_patterns(patterns.empty() ? -30.0 : patterns.front().floor_db);
}

// Indices of the patterns for one Tx position.
std::vector<std::size_t> draw_patterns(const PipelineConfig& c, Rng& rng) {
    const std::size_t n = c.patterns.size();
    const auto k = static_cast<std::size_t>(c.patterns_per_tx);
    if (k == 2 && is_reference_set(c.patterns)) {
        const auto narrow = static_cast<std::size_t>(kNarrowPatternCount);
        return {rng.below(narrow), narrow + rng.below(n - narrow)};
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(k);
    return idx;
}

std::string with_context(const std::string& what, const std::exception& e) { return what + ": " + e.what(); }

void touch(const fs::path& p) { std::ofstream(p, std::ios::trunc); }

}  // namespace

Json PipelineConfig::to_json() const {
    Json pats = Json::array();
    for (const AntennaPattern& p : patterns) pats.push_back(pattern_to_json(p));
    Json dirs = Json::array();
    for (const fs::path& d : scene_dirs) dirs.push_back(d.generic_string());
    return {
        {"seed", seed},
        {"scenes",
         {{"synthetic",
           {{"count", synthetic_count},
            {"grid_size", synthetic.grid_size},
            {"n_buildings", synthetic.n_buildings},
            {"height_range", {synthetic.height_min, synthetic.height_max}},
            {"vegetation_density", synthetic.vegetation_density},
            {"resolution", synthetic.resolution},
            {"aerial", synthetic.aerial}}},
          {"dirs", dirs}}},
        {"placement",
         {{"azimuth_step_deg", placement.azimuth_step_deg},
          {"tilts_deg", placement.tilts_deg},
          {"min_coverage", placement.min_coverage},
          {"tx_per_scene", tx_per_scene}}},
        {"patterns", pats},
        {"patterns_per_tx", patterns_per_tx},
        {"sim_params", params_to_json(params)},
        {"features",
         {{"sets", features.sets},
          {"fspl_variant", fspl_name(features.fspl_variant)},
          {"slice_step_m", features.slice_step_m},
          {"slice_top_m", features.slice_top_m},
          {"los_variant", features.los_variant == LosVariant::Binary ? "binary" : "ours"},
          {"los_frame", los_frame_name(features.los_frame)},
          {"los_ceiling_m", features.los_ceiling_m},
          {"normalize", features.normalize}}},
        {"normalization", bounds_to_json(features.bounds)},
        {"split", {{"seed", split_seed}, {"fractions", {{"train", split.train}, {"val", split.val}, {"test", split.test}}}}},
    };
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
    check_keys(j, {"seed", "output", "scenes", "placement", "patterns", "patterns_per_tx", "sim_params", "features",
                   "normalization", "split"},
               "config");
    PipelineConfig c;
    try {
        read_optional(j, "seed", c.seed);
        if (j.contains("output")) c.output = j.at("output").get<std::string>();
        if (j.contains("scenes")) {
            const Json& s = j.at("scenes");
            check_keys(s, {"synthetic", "dirs"}, "scenes");
            if (s.contains("synthetic")) {
                const Json& y = s.at("synthetic");
                check_keys(y, {"count", "grid_size", "n_buildings", "height_range", "vegetation_density", "resolution",
                               "aerial"},
                           "scenes.synthetic");
                read_optional(y, "count", c.synthetic_count);
                read_optional(y, "grid_size", c.synthetic.grid_size);
                read_optional(y, "n_buildings", c.synthetic.n_buildings);
                if (y.contains("height_range")) {
                    const auto r = y.at("height_range").get<std::vector<double>>();
                    if (r.size() != 2) throw ConfigError("scenes.synthetic.height_range needs two values");
                    c.synthetic.height_min = r[0];
                    c.synthetic.height_max = r[1];
                }
                read_optional(y, "vegetation_density", c.synthetic.vegetation_density);
                read_optional(y, "resolution", c.synthetic.resolution);
                read_optional(y, "aerial", c.synthetic.aerial);
            }
            if (s.contains("dirs"))
                for (const Json& d : s.at("dirs")) c.scene_dirs.emplace_back(d.get<std::string>());
        }
        if (j.contains("placement")) {
            const Json& p = j.at("placement");
            check_keys(p, {"azimuth_step_deg", "tilts_deg", "min_coverage", "tx_per_scene"}, "placement");
            read_optional(p, "azimuth_step_deg", c.placement.azimuth_step_deg);
            read_optional(p, "tilts_deg", c.placement.tilts_deg);
            read_optional(p, "min_coverage", c.placement.min_coverage);
            read_optional(p, "tx_per_scene", c.tx_per_scene);
        }
        if (j.contains("patterns"))
            for (const Json& p : j.at("patterns")) c.patterns.push_back(pattern_from_json(p));
        read_optional(j, "patterns_per_tx", c.patterns_per_tx);
        if (j.contains("sim_params")) c.params = params_from_json(j.at("sim_params"));
        if (j.contains("features")) {
            const Json& f = j.at("features");
            check_keys(f, {"sets", "fspl_variant", "slice_step_m", "slice_top_m", "los_variant", "los_frame",
                           "los_ceiling_m", "normalize"},
                       "features");
            read_optional(f, "sets", c.features.sets);
            if (f.contains("fspl_variant")) c.features.fspl_variant = fspl_from(f.at("fspl_variant").get<std::string>());
            read_optional(f, "slice_step_m", c.features.slice_step_m);
            read_optional(f, "slice_top_m", c.features.slice_top_m);
            if (f.contains("los_variant")) c.features.los_variant = los_variant_from(f.at("los_variant").get<std::string>());
            if (f.contains("los_frame")) c.features.los_frame = los_frame_from(f.at("los_frame").get<std::string>());
            read_optional(f, "los_ceiling_m", c.features.los_ceiling_m);
            read_optional(f, "normalize", c.features.normalize);
        }
        if (j.contains("normalization")) c.features.bounds = bounds_from_json(j.at("normalization"));
        if (j.contains("split")) {
            const Json& s = j.at("split");
            check_keys(s, {"seed", "fractions"}, "split");
            read_optional(s, "seed", c.split_seed);
            if (s.contains("fractions")) {
                const Json& f = s.at("fractions");
                check_keys(f, {"train", "val", "test"}, "split.fractions");
                read_optional(f, "train", c.split.train);
                read_optional(f, "val", c.split.val);
                read_optional(f, "test", c.split.test);
            }
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.patterns.empty()) c.patterns = default_patterns();
    if (c.tx_per_scene < 1) throw ConfigError("placement.tx_per_scene must be at least 1");
    if (c.patterns_per_tx < 1 || static_cast<std::size_t>(c.patterns_per_tx) > c.patterns.size())
        throw ConfigError("patterns_per_tx must lie in [1, number of patterns]");
    if (c.synthetic_count < 0) throw ConfigError("scenes.synthetic.count must be non-negative");
    if (c.synthetic_count == 0 && c.scene_dirs.empty()) throw ConfigError("config names no scenes");
    c.features.validate();
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    PipelineConfig c = PipelineConfig::from_json(read_json(path));
    const fs::path base = path.parent_path();
    if (c.output.is_relative()) c.output = base / c.output;
    for (fs::path& d : c.scene_dirs)
        if (d.is_relative()) d = base / d;
    return c;
}

std::vector<TxConfig> plan_transmitters(const NamedScene& ns, const PipelineConfig& c, std::uint64_t stream) {
    Rng rng = Rng::derived(c.seed, kPlacementStream + stream);
    std::vector<Vec3> candidates = candidate_positions(ns.scene);
    for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);

    std::vector<TxConfig> out;
    int placed = 0;
    for (const Vec3& pos : candidates) {
        if (placed >= c.tx_per_scene) break;
        std::vector<TxConfig> site;
        for (std::size_t idx : draw_patterns(c, rng)) {
            const AntennaPattern& pattern = c.patterns[idx];
            const auto options = search_orientations(ns.scene, pos, pattern, c.placement.azimuth_step_deg,
                                                     c.placement.tilts_deg, c.placement.min_coverage);
            if (options.empty()) break;
            TxConfig tx;
            tx.position = pos;
            tx.orientation = options[rng.below(options.size())];
            tx.pattern = pattern;
            tx.pattern_id = pattern.id();
            tx.scene_id = ns.id;
            site.push_back(tx);
        }
        if (site.size() != static_cast<std::size_t>(c.patterns_per_tx)) continue;
        out.insert(out.end(), site.begin(), site.end());
        ++placed;
    }
    return out;
}

SampleRecord make_sample(const NamedScene& ns, const TxConfig& tx, const PipelineConfig& c, const std::string& id) {
    SampleRecord s;
    s.sample_id = id;
    s.scene_id = ns.id;
    s.pattern_id = tx.pattern_id;
    s.tx = tx;
    s.grid = ns.scene.geometry();
    s.params = c.params;
    const RadioMap map = simulate_radio_map(ns.scene, tx, c.params);
    s.target = map.gray;
    s.pl_db = map.pl_db;
    s.los = compute_los(ns.scene, tx, c.features.los_ceiling_m, c.params.rx_height_m);
    s.features = build_features(ns.scene, tx, c.features, &*s.los);
    return s;
}

Manifest run_pipeline(const PipelineConfig& c, unsigned jobs) {
    c.params.validate();
    c.features.validate();
    const fs::path out = c.output;
    fs::create_directories(out / "scenes");
    fs::create_directories(out / "samples");
    write_json(out / "config.json", c.to_json());

    // Scenes.
    std::vector<std::string> ids;
    for (int i = 0; i < c.synthetic_count; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "synth_%03d", i);
        ids.emplace_back(buf);
    }
    for (const fs::path& d : c.scene_dirs) ids.push_back(d.filename().string());
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
        throw ConfigError("scene ids are not unique");

    std::vector<std::optional<NamedScene>> scenes(ids.size());
    std::vector<std::vector<TxConfig>> plans(ids.size());
    parallel_for(ids.size(), jobs, [&](std::size_t i) {
        const std::string& id = ids[i];
        try {
            const bool synthetic = i < static_cast<std::size_t>(c.synthetic_count);
            const fs::path dir = synthetic ? out / "scenes" / id : c.scene_dirs[i - c.synthetic_count];
            if (synthetic && !fs::exists(dir / kCompleteMarker)) {
                SyntheticSpec spec = c.synthetic;
                spec.seed = Rng::derived(c.seed, i).next();
                save_scene_dir(generate_synthetic_scene(spec), dir);
                touch(dir / kCompleteMarker);
            }
            scenes[i] = NamedScene{id, load_scene_dir(dir)};
            plans[i] = plan_transmitters(*scenes[i], c, i);
            if (synthetic) write_tx_list(dir / "tx.json", plans[i]);
        } catch (const std::exception& e) {
            throw Error(with_context("scene " + id, e));
        }
    });

    // Samples: one per (scene, Tx); ids carry the site index and pattern.
    struct Job {
        std::size_t scene;
        TxConfig tx;
        std::string id;
    };
    std::vector<Job> work;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto per_site = static_cast<std::size_t>(c.patterns_per_tx);
        for (std::size_t k = 0; k < plans[i].size(); ++k) {
            const TxConfig& tx = plans[i][k];
            work.push_back({i, tx, ids[i] + "_tx" + std::to_string(k / per_site) + "_" + tx.pattern_id});
        }
    }
    if (work.empty()) throw PreconditionViolation("no scene admits a valid transmitter");

    std::vector<SampleRecord> records(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t w) {
        const Job& job = work[w];
        const fs::path dir = out / "samples" / job.id;
        try {
            if (!fs::exists(dir / kCompleteMarker)) {
                fs::remove_all(dir);
                write_sample(make_sample(*scenes[job.scene], job.tx, c, job.id), dir);
                touch(dir / kCompleteMarker);
            }
            // Read back so resumed and fresh runs export the same thing.
            records[w] = read_sample(dir);
            if (!(records[w].tx == job.tx)) throw ConfigError("stored tx differs from the plan; delete the sample");
        } catch (const std::exception& e) {
            throw Error(with_context("sample " + job.id, e));
        }
    });

    Manifest m = build_manifest(records, c.split_seed, c.split);
    write_json(out / "manifest.json", m.to_json());
    return m;
}

}  // namespace rmgen
