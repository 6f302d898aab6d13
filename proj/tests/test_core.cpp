#include "oracles.hpp"

#include "rmgen/core.hpp"
#include "rmgen/errors.hpp"
#include "rmgen/grid.hpp"
#include "rmgen/parallel.hpp"
#include "rmgen/rng.hpp"
#include "rmgen/traversal.hpp"

#include <doctest.h>

#include <atomic>

using namespace rmgen;

TEST_CASE("sincos_deg is exact on multiples of 90 degrees") {
    for (int k = -8; k <= 8; ++k) {
        double s, c;
        sincos_deg(90.0 * k, s, c);
        const int m = ((k % 4) + 4) % 4;
        const double es[] = {0, 1, 0, -1}, ec[] = {1, 0, -1, 0};
        CHECK(s == es[m]);
        CHECK(c == ec[m]);
    }
}

TEST_CASE("sincos_deg matches std::sin/cos and is 90-degree covariant") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-720.0, 720.0);
        double s, c;
        sincos_deg(a, s, c);
        CHECK(s == doctest::Approx(std::sin(a * M_PI / 180.0)).epsilon(1e-12));
        CHECK(c == doctest::Approx(std::cos(a * M_PI / 180.0)).epsilon(1e-12));
    }
    for (double a : {15.0, 30.0, 37.5, 60.0, 75.0}) {
        double s0, c0, s1, c1;
        sincos_deg(a, s0, c0);
        sincos_deg(a + 90.0, s1, c1);
        CHECK(s1 == c0);
        CHECK(c1 == -s0);
    }
}

TEST_CASE("angle wrapping") {
    CHECK(wrap_deg_360(-90.0) == 270.0);
    CHECK(wrap_deg_360(360.0) == 0.0);
    CHECK(wrap_deg_360(725.0) == 5.0);
    CHECK(wrap_deg_pm180(180.0) == 180.0);
    CHECK(wrap_deg_pm180(-180.0) == 180.0);
    CHECK(wrap_deg_pm180(190.0) == -170.0);
    CHECK(wrap_deg_pm180(-190.0) == 170.0);
}

TEST_CASE("grid geometry") {
    const GridGeometry g{4, 2, 0.5};
    CHECK(g.extent_x() == 2.0);
    CHECK(g.extent_y() == 1.0);
    CHECK(g.cell_center(1, 3) == Vec2(1.75, 0.75));
    CHECK(g.contains(0.0, 0.0));
    CHECK_FALSE(g.contains(2.0, 0.5));
    CHECK(g.col_of(1.99) == 3);
    CHECK(g.row_of(0.5) == 1);
}

TEST_CASE("traversal visits exactly the cells a brute-force clip finds, in order") {
    const GridGeometry g{12, 12, 1.0};
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec2 a(rng.uniform(0, 12), rng.uniform(0, 12));
        const Vec2 b(rng.uniform(0, 12), rng.uniform(0, 12));
        std::vector<std::tuple<int, int, double, double>> seen;
        traverse_cells(g, a, b, [&](int r, int c, double t0, double t1) {
            seen.emplace_back(r, c, t0, t1);
            return true;
        });
        double covered = 0.0, last = 0.0;
        for (auto [r, c, t0, t1] : seen) {
            CHECK(t0 == doctest::Approx(last).epsilon(1e-12));
            const auto [o0, o1] = oracle::clip_to_cell(a, b, c, c + 1, r, r + 1);
            CHECK(o0 == doctest::Approx(t0).epsilon(1e-9));
            CHECK(o1 == doctest::Approx(t1).epsilon(1e-9));
            covered += t1 - t0;
            last = t1;
        }
        CHECK(covered == doctest::Approx(1.0).epsilon(1e-12));
        int expected = 0;
        for (int r = 0; r < 12; ++r)
            for (int c = 0; c < 12; ++c) {
                const auto [o0, o1] = oracle::clip_to_cell(a, b, c, c + 1, r, r + 1);
                if (o1 > o0 && (o1 - o0) * (b - a).norm() >= kMinSpan) ++expected;
            }
        CHECK(static_cast<int>(seen.size()) == expected);
    }
}

TEST_CASE("traversal through an exact corner skips the zero-length contact") {
    const GridGeometry g{4, 4, 1.0};
    std::vector<std::pair<int, int>> cells;
    traverse_cells(g, Vec2(0.5, 0.5), Vec2(2.5, 2.5), [&](int r, int c, double, double) {
        cells.emplace_back(r, c);
        return true;
    });
    CHECK(cells == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("parallel_for covers every index once and rethrows the lowest failure") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_WITH(parallel_for(100, 1, [](std::size_t i) {
                          if (i == 7 || i == 50) throw Error("item " + std::to_string(i));
                      }),
                      "item 7");
    CHECK(resolve_jobs(0) >= 1);
    CHECK(resolve_jobs(3) == 3);
}

TEST_CASE("seeded rng is reproducible and bounded") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const int v = r.between(-3, 5);
        CHECK(v >= -3);
        CHECK(v <= 5);
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(Rng::derived(1, 0).next() != Rng::derived(1, 1).next());
}
