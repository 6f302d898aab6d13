#include "oracles.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/placement.hpp"

#include <doctest.h>

using namespace rmgen;

TEST_CASE("candidate positions") {
    CHECK(candidate_positions(oracle::make_scene(RasterF::Zero(8, 8))).empty());

    RasterF b = RasterF::Zero(9, 9);
    b.block(3, 3, 3, 3).setConstant(10.0f);
    const auto c = candidate_positions(oracle::make_scene(b));
    REQUIRE(c.size() == 8);
    for (const Vec3& p : c) {
        CHECK(p.z() == 12.0);
        CHECK_FALSE((p.x() == 4.5 && p.y() == 4.5));  // interior cell
    }

    b.block(3, 3, 3, 3).setConstant(40.0f);
    CHECK(candidate_positions(oracle::make_scene(b)).empty());
    b.block(3, 3, 3, 3).setConstant(3.0f);  // z = 5 < 6
    CHECK(candidate_positions(oracle::make_scene(b)).empty());
    b.block(3, 3, 3, 3).setConstant(28.0f);  // z = 30, inclusive
    CHECK(candidate_positions(oracle::make_scene(b)).size() == 8);
}

TEST_CASE("roof edges at the grid border count the outside as open") {
    RasterF b = RasterF::Constant(4, 4, 10.0f);
    const Scene s = oracle::make_scene(b);
    CHECK(is_roof_edge(s, 0, 1));
    CHECK_FALSE(is_roof_edge(s, 1, 1));
    CHECK(outward_normal(s, 0, 1).isApprox(Vec2(0, -1)));
    CHECK(outward_normal(s, 3, 3).isApprox(Vec2(1, 1).normalized()));
    RasterF single = RasterF::Zero(3, 3);
    single(1, 1) = 8.0f;
    CHECK(outward_normal(oracle::make_scene(single), 1, 1).isZero());
}

TEST_CASE("isolated building: every outward azimuth is accepted") {
    RasterF b = RasterF::Zero(32, 32);
    b.block(14, 14, 3, 3).setConstant(10.0f);
    const Scene s = oracle::make_scene(b);
    const Vec3 pos(16.5, 15.5, 12.0);  // east edge, outward normal +x
    const auto o = search_orientations(s, pos, AntennaPattern::make(30, 60), 15.0, {-10.0}, 0.05);
    CHECK(o.size() == 11);  // azimuths strictly within 90 degrees of +x
    for (const Orientation& x : o) {
        CHECK(x.tilt_deg == -10.0);
        CHECK(azimuth_vector(x.azimuth_deg).x() > 0.0);
    }
    CHECK(o.front().azimuth_deg == 0.0);
}

TEST_CASE("facing a taller building two metres away is rejected") {
    RasterF b = RasterF::Zero(32, 64);
    b.block(10, 5, 11, 3).setConstant(10.0f);  // host, east edge at column 7
    b.col(10).setConstant(40.0f);               // wall after a 2 m gap
    const Scene s = oracle::make_scene(b);
    const Vec3 pos(7.5, 15.5, 12.0);
    const TxConfig tx = oracle::make_tx(pos, 0.0, 0.0, AntennaPattern::make(30, 60));

    // Brute-force coverage over the sector.
    int in_cone = 0, seen = 0;
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 64; ++c) {
            const Vec2 p(c + 0.5, r + 0.5);
            if (b(r, c) > 0.0f || !in_fnbw_sector(tx, p)) continue;
            ++in_cone;
            seen += oracle::segment_clear(s, pos, {p.x(), p.y(), 1.5});
        }
    const double brute = static_cast<double>(seen) / in_cone;
    CHECK(brute < 0.05);
    CHECK(ground_coverage(s, tx) == doctest::Approx(brute).epsilon(1e-15));
    const auto o = search_orientations(s, pos, tx.pattern, 15.0, {0.0}, 0.05);
    for (const Orientation& x : o) CHECK(x.azimuth_deg != 0.0);
}

TEST_CASE("search_orientations preconditions") {
    const Scene s = oracle::make_scene(RasterF::Zero(8, 8));
    const auto p = AntennaPattern::make(30, 60);
    CHECK_THROWS_AS(search_orientations(s, {4, 4, 10}, p, 15.0, {0.0}, 0.0), PreconditionViolation);
    CHECK_THROWS_AS(search_orientations(s, {4, 4, 10}, p, 15.0, {0.0}, 1.5), PreconditionViolation);
    CHECK_THROWS_AS(search_orientations(s, {4, 4, 10}, p, 7.0, {0.0}, 0.1), PreconditionViolation);
    CHECK_THROWS_AS(search_orientations(s, {4, 4, 10}, p, 0.0, {0.0}, 0.1), PreconditionViolation);
}

TEST_CASE("placements satisfy the invariants on random scenes") {
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const Scene s = oracle::random_block_scene(rng, 24, 5, 4.0, 26.0);
        const auto p = AntennaPattern::make(45, 90);
        for (const Vec3& pos : candidate_positions(s)) {
            TxConfig tx = oracle::make_tx(pos, 0.0, 0.0, p);
            REQUIRE(satisfies_placement_invariants(s, tx));
            const Vec2 n = outward_normal(s, s.geometry().row_of(pos.y()), s.geometry().col_of(pos.x()));
            for (const Orientation& o : search_orientations(s, pos, p, 30.0, {-5.0}, 0.1)) {
                if (!n.isZero()) CHECK(azimuth_vector(o.azimuth_deg).dot(n) > 0.0);
                tx.orientation = o;
                CHECK(ground_coverage(s, tx) >= 0.1);
            }
        }
    }
    RasterF b = RasterF::Zero(8, 8);
    b(3, 3) = 10.0f;
    const Scene s = oracle::make_scene(b);
    CHECK_FALSE(satisfies_placement_invariants(s, oracle::make_tx({3.5, 3.5, 11.0}, 0, 0, oracle::isotropic())));
    CHECK_FALSE(satisfies_placement_invariants(s, oracle::make_tx({1.5, 3.5, 12.0}, 0, 0, oracle::isotropic())));
}

TEST_CASE("raising obstacles never raises coverage") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Scene s = oracle::random_block_scene(rng, 20, 5);
        const TxConfig tx = oracle::make_tx({rng.uniform(0, 20), rng.uniform(0, 20), 28.0}, rng.uniform(0, 360), 0.0,
                                            AntennaPattern::make(45, 90));
        RasterF b = s.buildings().values();
        b = (b > 0.0f).select(b + static_cast<float>(rng.uniform(0.5, 8.0)), b);
        CHECK(ground_coverage(oracle::make_scene(b), tx) <= ground_coverage(s, tx));
    }
}

TEST_CASE("candidates translate with the scene") {
    Rng rng(12);
    const Scene s = oracle::random_block_scene(rng, 16, 4, 5.0, 20.0);
    RasterF padded = RasterF::Zero(23, 21);
    padded.block(4, 3, 16, 16) = s.buildings().values();
    const auto a = candidate_positions(s);
    const auto b = candidate_positions(oracle::make_scene(padded));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == a[i] + Vec3(3, 4, 0));
}
