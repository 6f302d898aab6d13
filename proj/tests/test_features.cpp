#include "oracles.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/features.hpp"
#include "rmgen/spatial.hpp"
#include "rmgen/synthetic.hpp"

#include <doctest.h>

using namespace rmgen;

namespace {

Scene sample_scene(std::uint64_t seed, int n = 24) {
    SyntheticSpec spec;
    spec.grid_size = n;
    spec.n_buildings = 5;
    spec.seed = seed;
    spec.aerial = true;
    return generate_synthetic_scene(spec);
}

TxConfig tx_at(double x, double y, double z, double az = 0.0) {
    return oracle::make_tx({x, y, z}, az, -10.0, AntennaPattern::make(30, 60, -30, 12.0));
}

}  // namespace

TEST_CASE("basic encoding") {
    const Scene flat = oracle::make_scene(RasterF::Zero(16, 16));
    const TxConfig tx = tx_at(4.5, 8.5, 20.0);
    const FeatureStack s = basic_features(flat, tx);
    CHECK(s.names() == std::vector<std::string>{"tx_onehot", "build_ndsm", "veg_ndsm", "gain_floor", "gain_top"});
    const RasterF& onehot = s.at("tx_onehot").values;
    CHECK((onehot != 0.0f).count() == 1);
    CHECK(onehot(8, 4) == 20.0f);
    const FeatureStack n = normalize(s);
    CHECK((n.at("build_ndsm").values == -1.0f).all());

    // On flat ground the boresight ground pixel carries the floor-gain maximum.
    const TxConfig down = oracle::make_tx({4.5, 8.5, 10.0}, 0.0, -45.0, tx.pattern);
    const RasterF gf = basic_features(flat, down).at("gain_floor").values;
    CHECK(gf(8, 14) == gf.maxCoeff());
    CHECK(gf(8, 14) == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("grid anchors") {
    const Scene s = oracle::make_scene(RasterF::Zero(6, 9), 2.0);
    const TxConfig tx = tx_at(3.0, 5.0, 12.0);
    const FeatureStack f = grid_anchor(s, tx);
    CHECK((f.at("tx_x").values == 3.0f).all());
    CHECK((f.at("tx_z").values == 12.0f).all());
    const RasterF& px = f.at("pixel_x").values;
    for (int c = 1; c < 9; ++c) CHECK(px(2, c) - px(2, c - 1) == 2.0f);
    CHECK(px(0, 0) == 1.0f);
    // pixel_y becomes pixel_x after a rotation by 90 degrees.
    const RasterF py_rot = apply_spatial(SpatialOp::Rot90, f.at("pixel_y").values);
    const Scene rs = apply_spatial(SpatialOp::Rot90, s);
    const FeatureStack g = grid_anchor(rs, apply_spatial(SpatialOp::Rot90, s.geometry(), tx));
    CHECK((g.at("pixel_x").values == py_rot).all());
}

TEST_CASE("cylindrical, euclidean and spherical encodings") {
    const Scene s = sample_scene(3);
    const TxConfig tx = tx_at(12.5, 12.5, 40.0, 90.0);
    const FeatureStack cyl = cylindrical_features(s, tx);
    const FeatureStack euc = euclidean_features(s, tx);
    const FeatureStack sph = spherical_features(s, tx);
    CHECK(cyl.names() == std::vector<std::string>{"dist2d", "azimuth", "build_rel", "veg_rel", "floor_rel"});
    CHECK(sph.channels.size() == 7);
    CHECK(cyl.at("dist2d").values(12, 12) == 0.0f);
    CHECK(cyl.at("azimuth").values(20, 12) == 0.0f);  // straight along +y, the boresight
    CHECK(cyl.at("azimuth").values(12, 20) == doctest::Approx(-90.0));
    CHECK((cyl.at("floor_rel").values == -40.0f).all());
    CHECK(euc.at("dx").values(12, 12) == 0.0f);
    CHECK(euc.at("dy").values(12, 12) == 0.0f);
    CHECK(euc.at("dx").values(20, 12) == doctest::Approx(8.0));
    for (const char* name : {"build_rel", "veg_rel", "floor_rel"})
        CHECK((cyl.at(name).values == euc.at(name).values).all());

    const RasterF& d = cyl.at("dist2d").values;
    const RasterF& dx = euc.at("dx").values;
    const RasterF& dy = euc.at("dy").values;
    const RasterF& d3 = sph.at("dist3d_ground").values;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double r2 = double(dx.data()[i]) * dx.data()[i] + double(dy.data()[i]) * dy.data()[i];
        CHECK(std::abs(r2 - double(d.data()[i]) * d.data()[i]) <= 1e-6 * std::max(1.0, r2));
        CHECK(d3.data()[i] == doctest::Approx(std::hypot(d.data()[i], 40.0)).epsilon(1e-6));
    }
    CHECK(sph.at("elevation_ground").values(12, 13) < 0.0f);
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (s.buildings().values().data()[i] == 0.0f) {
            CHECK(sph.at("elevation_build").values.data()[i] == -90.0f);
            CHECK(sph.at("dist3d_build").values.data()[i] == 0.0f);
        }
}

TEST_CASE("spherical elevations are consistent with ground LoS along a ray") {
    RasterF b = RasterF::Zero(1, 40);
    b(0, 10) = 15.0f;
    const Scene s = oracle::make_scene(b);
    const TxConfig tx = oracle::make_tx({0.5, 0.5, 20.0}, 0.0, 0.0, oracle::isotropic());
    const FeatureStack sph = spherical_features(s, tx);
    // Ground elevations refer to z = 0, so the receiver sits on the ground here.
    const RasterF ground = compute_los(s, tx, 32.0, 0.0).ground;
    const float top = sph.at("elevation_build").values(0, 10);
    for (int c = 11; c < 40; ++c)
        if (top > sph.at("elevation_ground").values(0, c)) CHECK(ground(0, c) == 0.0f);
}

TEST_CASE("gain slices") {
    CHECK(slice_heights(4.0).size() == 8);
    CHECK(slice_heights(1.0).size() == 29);
    CHECK(slice_name("gain", 4.0) == "gain_slice_4m");
    const Scene s = oracle::make_scene(RasterF::Zero(16, 16));
    const TxConfig tx = oracle::make_tx({2.5, 7.5, 8.0}, 0.0, 0.0, AntennaPattern::make(30, 60, -30, 12.0));
    const FeatureStack g = gain_slices(s, tx, slice_heights(4.0));
    REQUIRE(g.channels.size() == 8);
    const RasterF& at_tx = g.at("gain_slice_8m").values;
    float best = -1e9f;
    for (const Channel& c : g.channels) best = std::max(best, c.values.maxCoeff());
    CHECK(at_tx.row(7).maxCoeff() == best);
    CHECK(at_tx(7, 10) == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("path-loss encoding") {
    const Scene s = sample_scene(5);
    const TxConfig tx = tx_at(8.5, 8.5, 30.0, 45.0);
    const FeatureStack f = fspl_features(s, tx, FsplVariant::FloorTop);
    CHECK(f.names() == std::vector<std::string>{"fspl_floor", "fspl_top"});
    CHECK(fspl_features(s, tx, FsplVariant::Floor).channels.size() == 1);
    CHECK(fspl_features(s, tx, FsplVariant::Slices, slice_heights(4.0)).channels.size() == 8);
    const FeatureStack b = basic_features(s, tx);
    const FeatureStack sph = spherical_features(s, tx);
    const RasterF& fs = f.at("fspl_floor").values;
    const RasterF& gain = b.at("gain_floor").values;
    const RasterF& dist = sph.at("dist3d_ground").values;
    for (Eigen::Index i = 0; i < fs.size(); ++i)
        CHECK(std::abs(fs.data()[i] - (gain.data()[i] - 20.0 * std::log10(std::max(1.0f, dist.data()[i])))) < 1e-4);

    // g = 12 dB at d = 1 m is 12; d = 100 m on boresight is 12 - 40.
    const Scene line = oracle::make_scene(RasterF::Zero(1, 120));
    const TxConfig low = oracle::make_tx({0.5, 0.5, 0.0}, 0.0, 0.0, AntennaPattern::make(30, 60, -30, 10.0));
    const RasterF l = fspl_features(line, low, FsplVariant::Floor).at("fspl_floor").values;
    CHECK(l(0, 1) == doctest::Approx(10.0));
    CHECK(l(0, 100) == doctest::Approx(-30.0));
}

TEST_CASE("LoS encodings") {
    const Scene s = sample_scene(7, 20);
    const TxConfig tx = tx_at(10.5, 10.5, 35.0, 200.0);
    const LosMaps maps = compute_los(s, tx);
    const FeatureStack bin = los_features(s, tx, LosVariant::Binary, LosFrame::Absolute);
    CHECK((bin.at("los_ground").values == maps.ground).all());
    CHECK((bin.at("los_top").values == maps.top).all());
    const FeatureStack nb = normalize(bin);
    for (const Channel& c : nb.channels) CHECK(((c.values == -1.0f) || (c.values == 1.0f)).all());

    const RasterF abs = los_features(s, tx, LosVariant::Ours, LosFrame::Absolute).at("los_min").values;
    const RasterF rel = los_features(s, tx, LosVariant::Ours, LosFrame::Relative).at("los_min_rel").values;
    const RasterF elev = los_features(s, tx, LosVariant::Ours, LosFrame::Spherical).at("los_min_elev").values;
    CHECK((abs == maps.min_visible).all());
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c) {
            CHECK(rel(r, c) == doctest::Approx(maps.min_visible(r, c) - 35.0).epsilon(1e-6));
            const double d = std::hypot(c + 0.5 - 10.5, r + 0.5 - 10.5);
            CHECK(elev(r, c) == doctest::Approx(rad2deg(std::atan2(rel(r, c), d))).epsilon(1e-5));
        }
}

TEST_CASE("normalization") {
    FeatureStack s;
    s.append({"a", RasterF::Constant(2, 2, 3.0f), {3.0, 7.0}});
    s.append({"azimuth", RasterF::Zero(2, 2), {-180.0, 180.0}});
    s.append({"b", RasterF::Constant(2, 2, 7.0f), {3.0, 7.0}});
    const FeatureStack n = normalize(s);
    CHECK((n.at("a").values == -1.0f).all());
    CHECK((n.at("azimuth").values == 0.0f).all());
    CHECK((n.at("b").values == 1.0f).all());
    CHECK(n.normalized);
    CHECK_THROWS_AS(s.append({"a", RasterF::Zero(2, 2), {0, 1}}), ConfigError);

    FeatureStack bad;
    bad.append({"x", RasterF::Constant(2, 2, 8.0f), {3.0, 7.0}});
    CHECK_THROWS_AS(normalize(bad), NormalizationRange);

    const Scene sc = sample_scene(11);
    FeatureConfig cfg;
    cfg.sets = known_feature_sets();
    cfg.normalize = false;
    const FeatureStack raw = build_features(sc, tx_at(6.5, 17.5, 30.0, 300.0), cfg);
    const FeatureStack round = denormalize(normalize(raw));
    for (std::size_t i = 0; i < raw.channels.size(); ++i) {
        const RasterF diff = (raw.channels[i].values - round.channels[i].values).abs();
        const float scale = std::max(1.0f, raw.channels[i].values.abs().maxCoeff());
        CHECK(diff.maxCoeff() <= 1e-6f * scale);
    }
}

TEST_CASE("build_features: ordering, uniqueness and range") {
    const Scene s = sample_scene(13);
    FeatureConfig cfg;
    cfg.sets = known_feature_sets();
    const FeatureStack f = build_features(s, tx_at(3.5, 3.5, 28.0, 45.0), cfg);
    auto names = f.names();
    CHECK(names.front() == "tx_onehot");
    CHECK(names.back() == "aerial_ir");
    std::sort(names.begin(), names.end());
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
    for (const Channel& c : f.channels) {
        CHECK(c.values.rows() == 24);
        CHECK(c.values.minCoeff() >= -1.0f);
        CHECK(c.values.maxCoeff() <= 1.0f);
    }
    FeatureConfig def;
    const FeatureStack d = build_features(s, tx_at(3.5, 3.5, 28.0), def);
    CHECK(d.contains("los_min"));
    CHECK(d.contains("fspl_top"));
    CHECK_FALSE(d.contains("dx"));

    cfg.sets = {"basic", "nope"};
    CHECK_THROWS_AS(build_features(s, tx_at(3.5, 3.5, 28.0), cfg), ConfigError);
    CHECK_THROWS_AS(frame_channel("build_ndsm", s.geometry(), tx_at(3.5, 3.5, 28.0)), ConfigError);
    CHECK(is_frame_dependent("azimuth"));
    CHECK_FALSE(is_frame_dependent("dist2d"));
}

TEST_CASE("rotating scene and Tx rotates the geometry channels") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Scene s = sample_scene(seed);
        const TxConfig tx = tx_at(5.5 + seed, 17.5 - seed, 30.0, 37.0 * seed);
        FeatureConfig cfg;
        cfg.sets = {"basic", "cylindrical", "euclidean", "spherical", "gain_slices", "fspl", "los", "aerial"};
        const FeatureStack f = build_features(s, tx, cfg);
        const Scene rs = apply_spatial(SpatialOp::Rot90, s);
        const FeatureStack g = build_features(rs, apply_spatial(SpatialOp::Rot90, s.geometry(), tx), cfg);
        for (const Channel& c : f.channels) {
            const RasterF want = apply_spatial(SpatialOp::Rot90, c.values);
            CHECK_MESSAGE(((g.at(c.name).values - want).abs() <= 1e-6f).all(), c.name);
        }
    }
}
