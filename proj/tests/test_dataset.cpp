#include "oracles.hpp"

#include "rmgen/dataset.hpp"
#include "rmgen/errors.hpp"
#include "rmgen/pipeline.hpp"

#include <doctest.h>

#include <set>

using namespace rmgen;
namespace fs = std::filesystem;

namespace {

std::vector<SampleRecord> make_records(int scenes, int per_scene, int grid = 16) {
    PipelineConfig cfg;
    cfg.patterns = default_patterns();
    std::vector<SampleRecord> out;
    for (int i = 0; i < scenes; ++i) {
        SyntheticSpec spec;
        spec.grid_size = grid;
        spec.n_buildings = 3;
        spec.seed = static_cast<std::uint64_t>(i);
        const NamedScene ns{"s" + std::to_string(i), generate_synthetic_scene(spec)};
        for (int k = 0; k < per_scene; ++k) {
            const AntennaPattern& p = cfg.patterns[static_cast<std::size_t>(k) % cfg.patterns.size()];
            TxConfig tx = oracle::make_tx({grid / 2.0 + 0.5, grid / 2.0 - 0.5, 30.0}, 40.0 * k, -10.0, p);
            tx.scene_id = ns.id;
            out.push_back(make_sample(ns, tx, cfg, ns.id + "_tx" + std::to_string(k)));
        }
    }
    return out;
}

void check_same(const SampleRecord& a, const SampleRecord& b) {
    CHECK(a.sample_id == b.sample_id);
    CHECK(a.scene_id == b.scene_id);
    CHECK(a.pattern_id == b.pattern_id);
    CHECK(a.tx == b.tx);
    CHECK(a.grid == b.grid);
    CHECK(a.params == b.params);
    CHECK((a.target == b.target).all());
    REQUIRE(a.pl_db.has_value() == b.pl_db.has_value());
    if (a.pl_db) CHECK((*a.pl_db == *b.pl_db).all());
    REQUIRE(a.los.has_value() == b.los.has_value());
    if (a.los) {
        CHECK((a.los->ground == b.los->ground).all());
        CHECK((a.los->top == b.los->top).all());
        CHECK((a.los->min_visible == b.los->min_visible).all());
        CHECK((a.los->cone_mask == b.los->cone_mask).all());
    }
    CHECK(a.features.normalized == b.features.normalized);
    REQUIRE(a.features.names() == b.features.names());
    for (std::size_t i = 0; i < a.features.channels.size(); ++i) {
        CHECK((a.features.channels[i].values == b.features.channels[i].values).all());
        CHECK(a.features.channels[i].bounds == b.features.channels[i].bounds);
    }
}

}  // namespace

TEST_CASE("split sizes and determinism") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("scene" + std::to_string(i));
    const SplitAssignment a = assign_splits(ids, 42);
    CHECK(a.train.size() == 8);
    CHECK(a.val.size() == 1);
    CHECK(a.test.size() == 1);
    CHECK(assign_splits(ids, 42) == a);
    std::vector<std::string> shuffled(ids.rbegin(), ids.rend());
    shuffled.push_back("scene3");
    CHECK(assign_splits(shuffled, 42) == a);  // order and duplicates do not matter
    CHECK(a.split_of(a.val.front()) == "val");
    CHECK_THROWS_AS(a.split_of("nope"), ConfigError);

    CHECK(assign_splits({"a", "b", "c"}, 1).train.size() == 1);
    CHECK(assign_splits({"a", "b"}, 1).train.size() >= 1);
    CHECK(assign_splits({"a"}, 1).train == std::vector<std::string>{"a"});
    CHECK_THROWS_AS(assign_splits(ids, 1, {0.5, 0.2, 0.2}), ConfigError);
}

TEST_CASE("splits partition the scenes for many seeds") {
    Rng rng(99);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = rng.between(1, 40);
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
        const SplitAssignment a = assign_splits(ids, seed);
        std::multiset<std::string> all;
        for (const auto* v : {&a.train, &a.val, &a.test}) all.insert(v->begin(), v->end());
        REQUIRE(all.size() == static_cast<std::size_t>(n));
        REQUIRE(std::set<std::string>(all.begin(), all.end()).size() == all.size());
        REQUIRE(std::is_sorted(a.train.begin(), a.train.end()));
        REQUIRE(!a.train.empty());
    }
}

TEST_CASE("sample directories round-trip bit-exactly") {
    const auto recs = make_records(1, 1);
    const fs::path dir = oracle::scratch_dir("sample_rt");
    write_sample(recs[0], dir / "x");
    const SampleRecord back = read_sample(dir / "x");
    check_same(recs[0], back);
    CHECK(fs::exists(dir / "x" / "features" / "build_ndsm.f32"));
    CHECK(fs::exists(dir / "x" / "los" / "min_visible.json"));
    CHECK_THROWS_AS(read_sample(dir / "missing"), MissingFile);
    fs::remove(dir / "x" / "target.f32");
    CHECK_THROWS_AS(read_sample(dir / "x"), MissingFile);

    SampleRecord bad = recs[0];
    bad.sample_id = "has space";
    CHECK_THROWS_AS(write_sample(bad, dir / "bad"), ConfigError);
    bad = recs[0];
    bad.target = RasterF::Zero(3, 3);
    CHECK_THROWS_AS(write_sample(bad, dir / "bad"), DimensionMismatch);
}

TEST_CASE("export, re-export and import") {
    const auto recs = make_records(10, 1);
    const fs::path a = oracle::scratch_dir("export_a"), b = oracle::scratch_dir("export_b");
    const Manifest m = export_dataset(recs, a, 42, {}, 1);
    export_dataset(recs, b, 42, {}, 3);
    CHECK(oracle::tree_differences(a, b).empty());
    CHECK(m.splits.train.size() == 8);
    CHECK(m.samples.size() == 10);
    for (const ManifestEntry& e : m.samples) CHECK(e.split == m.splits.split_of(e.scene_id));

    const Dataset d = load_dataset(a);
    CHECK(d.manifest.to_json() == m.to_json());
    REQUIRE(d.samples.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) check_same(recs[i], d.samples[i]);

    const Json j = read_json(a / "manifest.json");
    CHECK(j.at("format") == "rmgen-dataset");
    CHECK(j.at("version") == 1);
    CHECK(j.at("target").at("encoding") == "gray");
    CHECK(j.at("channels").size() == recs[0].features.channels.size());
    CHECK(j.at("samples").at(0).at("path") == "samples/" + m.samples[0].sample_id);

    // Re-export from the sample directories reproduces the tree.
    std::vector<fs::path> dirs;
    for (const ManifestEntry& e : m.samples) dirs.push_back(a / e.path);
    const fs::path c = oracle::scratch_dir("export_c");
    export_dataset(dirs, c, 42);
    CHECK(oracle::tree_differences(a, c).empty());
}

TEST_CASE("export errors") {
    auto recs = make_records(2, 1);
    recs.push_back(recs[0]);
    const fs::path dir = oracle::scratch_dir("export_err");
    CHECK_THROWS_AS(export_dataset(recs, dir, 1), DuplicateSampleId);
    recs.pop_back();
    recs[1].params.reflection_loss_db = 3.0;
    CHECK_THROWS_AS(build_manifest(recs, 1), ConfigError);
    CHECK_THROWS_AS(export_dataset(std::vector<fs::path>{dir / "none"}, dir / "out", 1), MissingFile);
    CHECK_THROWS_AS(read_manifest(dir / "none"), MissingFile);

    Json j = build_manifest(make_records(1, 1), 1).to_json();
    j["version"] = 2;
    CHECK_THROWS_AS(Manifest::from_json(j), ManifestVersionMismatch);
    j["version"] = 1;
    j["format"] = "other";
    CHECK_THROWS_AS(Manifest::from_json(j), ManifestVersionMismatch);
}

TEST_CASE("metrics") {
    const RasterF truth = RasterF::Constant(4, 4, 0.5f);
    CHECK(rmse_gray(truth, truth) == 0.0);
    CHECK(nmse_db(truth, truth) == 0.0);
    const RasterF off = RasterF::Constant(4, 4, 0.6f);
    CHECK(rmse_gray(off, truth) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(rmse_db(off, truth) == doctest::Approx(7.7).epsilon(1e-6));
    CHECK(kGrayDbScale * 0.0621 == doctest::Approx(4.78).epsilon(1e-3));

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        RasterF p(8, 8), t(8, 8);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            p.data()[i] = static_cast<float>(rng.uniform());
            t.data()[i] = static_cast<float>(rng.uniform());
        }
        double se = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const double e = (p.data()[i] * 77.0 - 127.0) - (t.data()[i] * 77.0 - 127.0);
            se += e * e;
        }
        CHECK(std::abs(rmse_db(p, t) - std::sqrt(se / 64.0)) < 1e-9);
    }

    // Half the pixels exact, the other half off by 0.2 gray (15.4 dB).
    RasterF t = RasterF::Constant(2, 2, 0.5f), p = t;
    p(0, 0) = p(0, 1) = 0.7f;
    const double td = 0.5f * 77.0 - 127.0, pd = 0.7f * 77.0 - 127.0;
    CHECK(nmse_db(p, t) == doctest::Approx(2 * (pd - td) * (pd - td) / (4 * td * td)).epsilon(1e-12));
    // Predictions beyond the window count at the window edge in dB.
    RasterF over = t;
    over(0, 0) = 1.5f;
    RasterF edge = t;
    edge(0, 0) = 1.0f;
    CHECK(nmse_db(over, t) == nmse_db(edge, t));

    MetricAccumulator acc;
    acc.add(off, truth);
    acc.add(truth, truth);
    CHECK(acc.maps() == 2);
    CHECK(acc.pixels() == 32);
    CHECK(acc.rmse_gray() == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(rmse_gray(RasterF::Zero(2, 2), RasterF::Zero(3, 3)), DimensionMismatch);
    CHECK_THROWS_AS(MetricAccumulator().rmse_gray(), PreconditionViolation);
}

TEST_CASE("augmentation") {
    const SampleRecord s = make_records(1, 1, 12)[0];
    const SampleRecord back = augment(augment(s, SpatialOp::Rot90), SpatialOp::Rot270);
    check_same(s, back);
    check_same(s, augment(augment(s, SpatialOp::FlipH), SpatialOp::FlipH));

    // Augmenting equals recomputing for the rotated scene and Tx.
    SyntheticSpec spec;
    spec.grid_size = 12;
    spec.n_buildings = 3;
    spec.seed = 0;
    const Scene scene = generate_synthetic_scene(spec);
    PipelineConfig cfg;
    cfg.patterns = default_patterns();
    for (SpatialOp op : {SpatialOp::Rot90, SpatialOp::Rot180, SpatialOp::Rot270}) {
        const SampleRecord a = augment(s, op);
        const NamedScene rs{"s0", apply_spatial(op, scene)};
        const SampleRecord r = make_sample(rs, a.tx, cfg, s.sample_id);
        CHECK(a.grid == r.grid);
        REQUIRE(a.features.names() == r.features.names());
        for (std::size_t i = 0; i < a.features.channels.size(); ++i)
            CHECK_MESSAGE(((a.features.channels[i].values - r.features.channels[i].values).abs() <= 1e-6f).all(),
                          a.features.channels[i].name);
        CHECK(((a.target - r.target).abs() <= 1e-5f).all());
    }
}
