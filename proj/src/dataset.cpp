#include "rmgen/dataset.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/parallel.hpp"
#include "rmgen/raster_io.hpp"
#include "rmgen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace rmgen {

namespace fs = std::filesystem;

namespace {

const char* const kLosNames[] = {"ground", "top", "min_visible", "cone_mask"};

RasterF& los_member(LosMaps& m, int i) {
    RasterF* members[] = {&m.ground, &m.top, &m.min_visible, &m.cone_mask};
    return *members[i];
}
const RasterF& los_member(const LosMaps& m, int i) { return los_member(const_cast<LosMaps&>(m), i); }

bool valid_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

void require_grid(const RasterF& r, const GridGeometry& g, const std::string& what) {
    if (r.rows() != g.height || r.cols() != g.width)
        throw DimensionMismatch(what + " is " + std::to_string(r.cols()) + "x" + std::to_string(r.rows()) +
                                ", grid is " + std::to_string(g.width) + "x" + std::to_string(g.height));
}

RasterF read_on_grid(const fs::path& path, const GridGeometry& g) {
    RasterFile f = read_raster(path);
    require_grid(f.values, g, path.string());
    if (f.resolution != g.resolution) throw DimensionMismatch(path.string() + ": resolution differs from the grid");
    return std::move(f.values);
}

Json channels_to_json(const FeatureStack& s) {
    Json list = Json::array();
    for (const Channel& c : s.channels)
        list.push_back({{"name", c.name},
                        {"lo", c.bounds.lo},
                        {"hi", c.bounds.hi},
                        {"offset", c.bounds.offset()},
                        {"scale", c.bounds.scale()}});
    return {{"channels", list}, {"normalized", s.normalized}};
}

Json fractions_to_json(const SplitFractions& f) { return {{"train", f.train}, {"val", f.val}, {"test", f.test}}; }

void check_fractions(const SplitFractions& f) {
    if (f.train < 0 || f.val < 0 || f.test < 0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
        throw ConfigError("split fractions must be non-negative and sum to 1");
}

// Gray to dB over the fixed window; predictions outside [0, 1] are clamped.
double to_db(float gray) { return std::clamp(static_cast<double>(gray), 0.0, 1.0) * kGrayDbScale - 127.0; }

void require_same_shape(const RasterF& pred, const RasterF& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw DimensionMismatch("prediction and truth grids differ");
    if (pred.size() == 0) throw PreconditionViolation("empty grids");
}

}  // namespace

void validate_sample(const SampleRecord& s) {
    for (const std::string* id : {&s.sample_id, &s.scene_id, &s.pattern_id})
        if (!valid_id(*id)) throw ConfigError("invalid identifier '" + *id + "' in sample '" + s.sample_id + "'");
    if (s.grid.width < 1 || s.grid.height < 1 || !(s.grid.resolution > 0.0))
        throw ConfigError("sample '" + s.sample_id + "' has an empty grid");
    require_grid(s.target, s.grid, "target");
    if (s.pl_db) require_grid(*s.pl_db, s.grid, "pl_db");
    for (const Channel& c : s.features.channels) {
        if (!valid_id(c.name)) throw ConfigError("invalid channel name '" + c.name + "'");
        require_grid(c.values, s.grid, "channel " + c.name);
    }
    if (s.los)
        for (int i = 0; i < 4; ++i) require_grid(los_member(*s.los, i), s.grid, std::string("los ") + kLosNames[i]);
}

void write_sample(const SampleRecord& s, const fs::path& dir) {
    validate_sample(s);
    fs::create_directories(dir);
    const double res = s.grid.resolution;
    write_json(dir / "sample.json", {{"sample_id", s.sample_id},
                                     {"scene_id", s.scene_id},
                                     {"pattern_id", s.pattern_id},
                                     {"grid", grid_to_json(s.grid)},
                                     {"sim_params", params_to_json(s.params)}});
    write_json(dir / "tx.json", tx_to_json(s.tx));
    write_raster(dir / "target.f32", s.target, res);
    if (s.pl_db) write_raster(dir / "pl_db.f32", *s.pl_db, res);
    write_feature_stack(s.features, dir, res);
    if (s.los) write_los_maps(*s.los, dir, res);
}

void write_feature_stack(const FeatureStack& stack, const fs::path& dir, double resolution) {
    fs::create_directories(dir / "features");
    write_json(dir / "channels.json", channels_to_json(stack));
    for (const Channel& c : stack.channels) {
        if (!valid_id(c.name)) throw ConfigError("invalid channel name '" + c.name + "'");
        write_raster(dir / "features" / (c.name + ".f32"), c.values, resolution);
    }
}

void write_los_maps(const LosMaps& maps, const fs::path& dir, double resolution) {
    fs::create_directories(dir / "los");
    for (int i = 0; i < 4; ++i)
        write_raster(dir / "los" / (std::string(kLosNames[i]) + ".f32"), los_member(maps, i), resolution);
}

SampleRecord read_sample(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw MissingFile(dir.string());
    SampleRecord s;
    const Json meta = read_json(dir / "sample.json");
    try {
        s.sample_id = meta.at("sample_id").get<std::string>();
        s.scene_id = meta.at("scene_id").get<std::string>();
        s.pattern_id = meta.at("pattern_id").get<std::string>();
    } catch (const Json::exception& e) {
        throw ConfigError((dir / "sample.json").string() + ": " + e.what());
    }
    s.grid = grid_from_json(meta.at("grid"));
    s.params = params_from_json(meta.value("sim_params", Json::object()));
    s.tx = tx_from_json(read_json(dir / "tx.json"));

    const Json ch = read_json(dir / "channels.json");
    s.features.normalized = ch.value("normalized", false);
    for (const Json& c : ch.at("channels")) {
        const std::string name = c.at("name").get<std::string>();
        if (!valid_id(name)) throw ConfigError("invalid channel name '" + name + "'");
        s.features.append({name, read_on_grid(dir / "features" / (name + ".f32"), s.grid),
                           {c.at("lo").get<double>(), c.at("hi").get<double>()}});
    }
    s.target = read_on_grid(dir / "target.f32", s.grid);
    if (fs::exists(dir / "pl_db.f32")) s.pl_db = read_on_grid(dir / "pl_db.f32", s.grid);
    if (fs::exists(dir / "los")) {
        LosMaps m;
        for (int i = 0; i < 4; ++i)
            los_member(m, i) = read_on_grid(dir / "los" / (std::string(kLosNames[i]) + ".f32"), s.grid);
        s.los = std::move(m);
    }
    validate_sample(s);
    return s;
}

std::string SplitAssignment::split_of(const std::string& scene_id) const {
    auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), scene_id) != v.end(); };
    if (in(train)) return "train";
    if (in(val)) return "val";
    if (in(test)) return "test";
    throw ConfigError("scene '" + scene_id + "' has no split");
}

SplitAssignment assign_splits(std::vector<std::string> ids, std::uint64_t seed, const SplitFractions& f) {
    check_fractions(f);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Rng rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);

    const std::size_t n = ids.size();
    auto count = [&](double frac) {
        auto k = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
        if (n >= 3 && frac > 0.0) k = std::max<std::size_t>(k, 1);
        return k;
    };
    std::size_t n_val = count(f.val), n_test = count(f.test);
    // Train keeps at least one scene whenever it has a nonzero share.
    while (n_val + n_test > n || (f.train > 0.0 && n > 0 && n_val + n_test == n)) {
        if (n_val + n_test == 0) break;
        if (n_test >= n_val) --n_test;
        else --n_val;
    }
    SplitAssignment out;
    out.val.assign(ids.begin(), ids.begin() + n_val);
    out.test.assign(ids.begin() + n_val, ids.begin() + n_val + n_test);
    out.train.assign(ids.begin() + n_val + n_test, ids.end());
    for (auto* v : {&out.train, &out.val, &out.test}) std::sort(v->begin(), v->end());
    return out;
}

Json Manifest::to_json() const {
    Json ch = Json::array();
    for (const ManifestChannel& c : channels)
        ch.push_back({{"name", c.name},
                      {"lo", c.bounds.lo},
                      {"hi", c.bounds.hi},
                      {"offset", c.bounds.offset()},
                      {"scale", c.bounds.scale()}});
    Json entries = Json::array();
    for (const ManifestEntry& e : samples)
        entries.push_back({{"sample_id", e.sample_id},
                           {"scene_id", e.scene_id},
                           {"pattern_id", e.pattern_id},
                           {"split", e.split},
                           {"path", e.path}});
    return {
        {"format", kDatasetFormat},
        {"version", version},
        {"grid", grid_to_json(grid)},
        {"channels", ch},
        {"normalized", normalized},
        {"target", {{"file", "target.f32"}, {"encoding", "gray"}, {"noise_floor_db", params.noise_floor_db},
                    {"max_pl_db", params.max_pl_db}}},
        {"splits", {{"seed", split_seed}, {"fractions", fractions_to_json(fractions)}, {"train", splits.train},
                    {"val", splits.val}, {"test", splits.test}}},
        {"sim_params", params_to_json(params)},
        {"metrics", {{"gray_db_scale", kGrayDbScale},
                     {"nmse", "sum((pred_db - truth_db)^2) / sum(truth_db^2), pooled over the evaluated maps"}}},
        {"samples", entries},
    };
}

Manifest Manifest::from_json(const Json& j) {
    if (j.value("format", std::string()) != kDatasetFormat || !j.contains("version") ||
        !j.at("version").is_number_integer() || j.at("version").get<int>() != kDatasetVersion)
        throw ManifestVersionMismatch("expected " + std::string(kDatasetFormat) + " version " +
                                      std::to_string(kDatasetVersion));
    try {
        Manifest m;
        m.grid = grid_from_json(j.at("grid"));
        for (const Json& c : j.at("channels"))
            m.channels.push_back({c.at("name").get<std::string>(), {c.at("lo").get<double>(), c.at("hi").get<double>()}});
        m.normalized = j.at("normalized").get<bool>();
        const Json& sp = j.at("splits");
        m.split_seed = sp.at("seed").get<std::uint64_t>();
        m.fractions = {sp.at("fractions").at("train").get<double>(), sp.at("fractions").at("val").get<double>(),
                       sp.at("fractions").at("test").get<double>()};
        m.splits.train = sp.at("train").get<std::vector<std::string>>();
        m.splits.val = sp.at("val").get<std::vector<std::string>>();
        m.splits.test = sp.at("test").get<std::vector<std::string>>();
        m.params = params_from_json(j.at("sim_params"));
        for (const Json& e : j.at("samples"))
            m.samples.push_back({e.at("sample_id").get<std::string>(), e.at("scene_id").get<std::string>(),
                                 e.at("pattern_id").get<std::string>(), e.at("split").get<std::string>(),
                                 e.at("path").get<std::string>()});
        return m;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

Manifest build_manifest(const std::vector<SampleRecord>& samples, std::uint64_t split_seed,
                        const SplitFractions& fractions) {
    if (samples.empty()) throw PreconditionViolation("no samples to export");
    check_fractions(fractions);
    std::set<std::string> ids;
    for (const SampleRecord& s : samples) {
        validate_sample(s);
        if (!ids.insert(s.sample_id).second) throw DuplicateSampleId(s.sample_id);
    }

    const SampleRecord& first = samples.front();
    Manifest m;
    m.grid = first.grid;
    m.params = first.params;
    m.normalized = first.features.normalized;
    for (const Channel& c : first.features.channels) m.channels.push_back({c.name, c.bounds});
    for (const SampleRecord& s : samples) {
        if (!(s.grid == m.grid)) throw DimensionMismatch("sample '" + s.sample_id + "' has a different grid");
        if (!(s.params == m.params)) throw ConfigError("sample '" + s.sample_id + "' has different sim params");
        std::vector<ManifestChannel> ch;
        for (const Channel& c : s.features.channels) ch.push_back({c.name, c.bounds});
        if (ch != m.channels || s.features.normalized != m.normalized)
            throw ConfigError("sample '" + s.sample_id + "' has a different channel registry");
    }

    std::vector<std::string> scenes;
    for (const SampleRecord& s : samples) scenes.push_back(s.scene_id);
    m.split_seed = split_seed;
    m.fractions = fractions;
    m.splits = assign_splits(scenes, split_seed, fractions);
    for (const SampleRecord& s : samples)
        m.samples.push_back({s.sample_id, s.scene_id, s.pattern_id, m.splits.split_of(s.scene_id),
                             "samples/" + s.sample_id});
    std::sort(m.samples.begin(), m.samples.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.sample_id < b.sample_id; });
    return m;
}

Manifest export_dataset(const std::vector<SampleRecord>& samples, const fs::path& out_dir, std::uint64_t split_seed,
                        const SplitFractions& fractions, unsigned jobs) {
    Manifest m = build_manifest(samples, split_seed, fractions);
    parallel_for(samples.size(), jobs,
                 [&](std::size_t i) { write_sample(samples[i], out_dir / "samples" / samples[i].sample_id); });
    write_json(out_dir / "manifest.json", m.to_json());
    return m;
}

Manifest export_dataset(const std::vector<fs::path>& sample_dirs, const fs::path& out_dir, std::uint64_t split_seed,
                        const SplitFractions& fractions, unsigned jobs) {
    std::vector<SampleRecord> samples(sample_dirs.size());
    parallel_for(sample_dirs.size(), jobs, [&](std::size_t i) { samples[i] = read_sample(sample_dirs[i]); });
    return export_dataset(samples, out_dir, split_seed, fractions, jobs);
}

Manifest read_manifest(const fs::path& dataset_dir) { return Manifest::from_json(read_json(dataset_dir / "manifest.json")); }

Dataset load_dataset(const fs::path& dataset_dir) {
    Dataset d;
    d.manifest = read_manifest(dataset_dir);
    for (const ManifestEntry& e : d.manifest.samples) {
        SampleRecord s = read_sample(dataset_dir / e.path);
        if (s.sample_id != e.sample_id || s.scene_id != e.scene_id)
            throw ConfigError("sample at " + e.path + " does not match its manifest entry");
        if (!(s.grid == d.manifest.grid)) throw DimensionMismatch("sample '" + s.sample_id + "' has a different grid");
        d.samples.push_back(std::move(s));
    }
    return d;
}

double rmse_gray(const RasterF& pred, const RasterF& truth) {
    MetricAccumulator acc;
    acc.add(pred, truth);
    return acc.rmse_gray();
}

double rmse_db(const RasterF& pred, const RasterF& truth) { return kGrayDbScale * rmse_gray(pred, truth); }

double nmse_db(const RasterF& pred, const RasterF& truth) {
    MetricAccumulator acc;
    acc.add(pred, truth);
    return acc.nmse_db();
}

void MetricAccumulator::add(const RasterF& pred, const RasterF& truth) {
    require_same_shape(pred, truth);
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const double p = pred.data()[i], t = truth.data()[i];
        if (!std::isfinite(p) || !std::isfinite(t)) throw PreconditionViolation("non-finite gray value");
        sq_gray_ += (p - t) * (p - t);
        const double pd = to_db(pred.data()[i]), td = to_db(truth.data()[i]);
        sq_err_db_ += (pd - td) * (pd - td);
        sq_truth_db_ += td * td;
    }
    pixels_ += static_cast<std::size_t>(pred.size());
    ++maps_;
}

double MetricAccumulator::rmse_gray() const {
    if (pixels_ == 0) throw PreconditionViolation("no maps accumulated");
    return std::sqrt(sq_gray_ / static_cast<double>(pixels_));
}

double MetricAccumulator::nmse_db() const {
    if (pixels_ == 0) throw PreconditionViolation("no maps accumulated");
    return sq_err_db_ / sq_truth_db_;
}

SampleRecord augment(const SampleRecord& s, SpatialOp op) {
    SampleRecord out = s;
    out.grid = apply_spatial(op, s.grid);
    out.tx = apply_spatial(op, s.grid, s.tx);
    out.target = apply_spatial(op, s.target);
    if (s.pl_db) out.pl_db = apply_spatial(op, *s.pl_db);
    if (s.los)
        for (int i = 0; i < 4; ++i) los_member(*out.los, i) = apply_spatial(op, los_member(*s.los, i));
    for (Channel& c : out.features.channels) {
        if (!is_frame_dependent(c.name)) {
            c.values = apply_spatial(op, c.values);
            continue;
        }
        Channel fresh = frame_channel(c.name, out.grid, out.tx);
        c.bounds = fresh.bounds;
        FeatureStack one{{fresh}, false};
        c.values = s.features.normalized ? normalize(one).channels.front().values : fresh.values;
    }
    return out;
}

}  // namespace rmgen
