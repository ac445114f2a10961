#include <cmath>

#include "doctest.h"
#include "heilbronn/search.hpp"
#include "heilbronn/triangles.hpp"

using namespace heilbronn;

namespace {

AnnealSchedule quick(std::size_t moves, std::size_t epochs, std::uint64_t seed = 1) {
    AnnealSchedule s;
    s.moves_per_epoch = moves, s.epochs = epochs, s.seed = seed;
    return s;
}

// best d(X) for two pairs on a coarse grid: points on a 5x5 grid, 12 angles
double two_pair_grid_optimum() {
    double best = 0;
    std::vector<Point> pts;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) pts.push_back(Point::of(i / 4.0, j / 4.0));
    std::vector<Vec3> dirs;
    for (int a = 0; a < 12; ++a) dirs.push_back({std::cos(M_PI * a / 12), std::sin(M_PI * a / 12), 0});
    for (auto& p : pts)
        for (auto& q : pts)
            for (auto& u : dirs)
                for (auto& v : dirs) {
                    double d1 = point_line_distance(p, Line(q, v)), d2 = point_line_distance(q, Line(p, u));
                    best = std::max(best, std::min(d1, d2));
                }
    return best;
}

}  // namespace

TEST_CASE("schedule validation") {
    AnnealSchedule s;
    CHECK_NOTHROW(s.validate());
    s.cooling = 1;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    s.cooling = 0.9, s.epochs = 0;
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    CHECK_THROWS_AS(anneal_max_dx(1, 2, quick(10, 1)), InvalidInput);
    CHECK_THROWS_AS(anneal_max_triangle(2, 2, quick(10, 1)), InvalidInput);
}

TEST_CASE("anneal d(X): two pairs") {
    const double grid = two_pair_grid_optimum();
    CHECK(grid == doctest::Approx(std::sqrt(2.0)));
    auto r = anneal_max_dx(2, 2, quick(1000, 10));
    MESSAGE("two pairs: " << r.dx << " grid optimum " << grid);
    CHECK(r.dx >= 0.5);
    CHECK(r.dx <= std::sqrt(2.0) + 1e-9);
}

TEST_CASE("anneal d(X): feasibility, best-ever trace, determinism") {
    auto a = anneal_max_dx(20, 3, quick(500, 20, 7));
    CHECK(validate_configuration(a.X).empty());
    CHECK(a.dx == doctest::Approx(min_config_distance(a.X)).epsilon(1e-12));
    CHECK(std::abs(a.dx - a.best_trace.back()) <= 1e-12);
    for (std::size_t i = 1; i < a.best_trace.size(); ++i) CHECK(a.best_trace[i] >= a.best_trace[i - 1]);
    auto b = anneal_max_dx(20, 3, quick(500, 20, 7));
    REQUIRE(a.X.size() == b.X.size());
    for (std::size_t i = 0; i < a.X.size(); ++i) {
        CHECK(a.X.pairs[i].p.v == b.X.pairs[i].p.v);
        CHECK(a.X.pairs[i].l.dir() == b.X.pairs[i].l.dir());
    }
    // envelope: trivial packing bound at the achieved separation
    CHECK(static_cast<double>(a.X.size()) <= 10 * std::pow(a.dx, -3));
}

TEST_CASE("anneal d(X): seeded with the vertical construction never degrades") {
    for (int d : {2, 3}) {
        auto V = generate_vertical(1.0 / 16, d);
        const double d0 = min_config_distance(V);
        auto r = anneal_max_dx(V.size(), d, quick(200, 5, 3), &V);
        CHECK(r.dx >= d0 - 1e-12);
    }
}

TEST_CASE("anneal d(X): 64 planar pairs against the vertical construction") {
    auto V = generate_vertical(1.0 / 128, 2);
    REQUIRE(V.size() == 64);
    auto r = anneal_max_dx(64, 2, AnnealSchedule{});
    MESSAGE("n=64: annealed d(X) " << r.dx << " vertical parameter " << 1.0 / 128 << " vertical d(X) "
                                   << min_config_distance(V));
    CHECK(r.dx >= 0.8 / 128);
}

TEST_CASE("anneal triangle: three points in the square") {
    auto r = anneal_max_triangle(3, 2, quick(1000, 20));
    MESSAGE("n=3: " << r.area);
    CHECK(r.area == doctest::Approx(0.5).epsilon(0.02));
    CHECK(r.area <= 0.5 + 1e-12);
}

TEST_CASE("anneal triangle: seeding, trace and feasibility") {
    auto par = generate_erdos_parabola(5);
    const double p0 = min_triangle_fast(par).area;
    auto r = anneal_max_triangle(5, 2, quick(300, 10, 2), &par);
    CHECK(r.area >= p0);
    CHECK(r.area == min_triangle_brute(r.P).area);
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) CHECK(r.best_trace[i] >= r.best_trace[i - 1]);
    for (auto& p : r.P)
        for (int k = 0; k < 2; ++k) CHECK((p[k] >= 0 && p[k] <= 1));
    auto r2 = anneal_max_triangle(5, 2, quick(300, 10, 2), &par);
    CHECK(r.area == r2.area);
}

TEST_CASE("anneal triangle: area times n^2 against the parabola construction") {
    for (std::size_t n : {8, 16, 32}) {
        auto r = anneal_max_triangle(n, 2, quick(2000, 30, n));
        auto par = generate_erdos_parabola(static_cast<int>(n));
        double pa = min_triangle_fast(par).area;
        MESSAGE("n=" << n << " annealed area*n^2 " << r.area * n * n << " parabola " << pa * n * n);
        CHECK(r.area >= pa);
    }
}

TEST_CASE("log-log fits") {
    auto f = fit_loglog({1, 2, 4, 8}, {3, 12, 48, 192});
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)));
    CHECK(f.r2 == doctest::Approx(1));
    CHECK_THROWS_AS(fit_loglog({1, 2}, {1, 2}), InvalidInput);
    CHECK_THROWS_AS(fit_loglog({1, 2, 4}, {1, 0, 0}), InvalidInput);
    CHECK_THROWS_AS(exponent_estimate("vertical", {0.1, 0.05}, {0}), InvalidInput);
    CHECK_THROWS_AS(exponent_estimate("nope", {0.1, 0.05, 0.01}, {0}), InvalidInput);
}

TEST_CASE("exponent: vertical construction") {
    for (int d : {2, 3}) {
        ExponentOptions o;
        o.dim = d;
        auto f = exponent_estimate("vertical", {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}, {0}, o);
        CHECK(f.slope == doctest::Approx(-(d - 1)).epsilon(0.05 / (d - 1)));
    }
}

TEST_CASE("exponent: point-line triangle pipeline") {
    ExponentOptions o;
    o.dim = 3;
    auto f = exponent_estimate("pipeline", {64, 128, 256, 512, 1024}, {0, 1, 2}, o);
    MESSAGE("pipeline slope " << f.slope);
    CHECK(f.slope <= -2.0 / 3 + 0.15);
}

TEST_CASE("exponent: annealed d(X) lies between the envelopes, cache resumes") {
    std::map<std::pair<std::size_t, std::uint64_t>, double> cache;
    ExponentOptions o;
    o.dim = 2;
    o.cache = &cache;
    const std::vector<double> ladder{1.0 / 16, 1.0 / 32, 1.0 / 64};
    auto f = exponent_estimate("anneal-dx", ladder, {0}, o);
    MESSAGE("annealed counts " << f.value[0] << " " << f.value[1] << " " << f.value[2] << " exponent " << -f.slope);
    CHECK(-f.slope >= 1.0);
    CHECK(-f.slope <= 2.0);
    for (std::size_t r = 0; r < ladder.size(); ++r) CHECK(f.value[r] <= 10 * std::pow(ladder[r], -2));
    CHECK(cache.size() == 3);
    auto g = exponent_estimate("anneal-dx", ladder, {0}, o);
    CHECK(g.slope == f.slope);
}
