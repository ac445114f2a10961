#include <cmath>
#include <random>

#include "doctest.h"
#include "heilbronn/config.hpp"
#include "heilbronn/incidence.hpp"
#include "heilbronn/multiscale.hpp"

using namespace heilbronn;

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
    mx /= x.size(), my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = std::log(x[i]) - mx;
        sxy += a * (std::log(y[i]) - my), sxx += a * a;
    }
    return sxy / sxx;
}

// w^{d-1} times the line integral of eta_w around p, trapezoid at step w/256
double fine_pair(double w, const Point& p, const Line& l) {
    const int d = p.dim;
    Vec3 c = l.project(p.v);
    double h = w / 256, s = 0;
    for (double t = -3 * w; t <= 3 * w; t += h) s += eta_kernel(w, c + t * l.dir() - p.v, d);
    return std::pow(w, d - 1) * s * h;
}

}  // namespace

TEST_CASE("bump profile") {
    for (int d : {2, 3}) {
        const auto& b = bump_profile(d);
        CHECK(b.integral() == doctest::Approx(1).epsilon(1e-6));
        CHECK(b(0.5) >= 0.5);
        CHECK(b(2.0) == 0.0);
        CHECK(b.r2 <= 2);
        for (double r = 0; r <= 2.5; r += 1e-3) {
            CHECK(b(r) >= 0);
            CHECK(b(r) <= 1);
        }
        MESSAGE("d=", d, " outer radius ", b.r2);
    }
}

TEST_CASE("eta kernel") {
    for (int d : {2, 3}) {
        const auto& K = eta_kernel_table(d);
        CHECK(K.mass() == doctest::Approx(1).epsilon(1e-4));
        CHECK(K.support() <= 3);
        for (double v : K.eta_table()) CHECK(v >= 0);
        CHECK(eta_kernel(0.1, {0.3, 0, 0}, d) == 0.0);
        CHECK(eta_kernel(0.1, {0, 0, 0}, d) > 0);
    }
    // Monte-Carlo convolution at the origin
    const auto& chi = bump_profile(3);
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> U(-1, 1);
    const double R = chi.r2 / 2;
    double acc = 0;
    const int S = 1000000;
    for (int i = 0; i < S; ++i) {
        Vec3 y{R * U(g), R * U(g), R * U(g)};
        double r = norm(y);
        acc += chi(r) * 8 * chi(2 * r);
    }
    double mc = acc / S * 8 * R * R * R;
    MESSAGE("eta(0) table ", eta_kernel(1, {0, 0, 0}, 3), " MC ", mc);
    CHECK(eta_kernel(1, {0, 0, 0}, 3) == doctest::Approx(mc).epsilon(1e-2));
    // scaling
    CHECK(eta_kernel(0.5, {0.1, 0, 0}, 3) == doctest::Approx(8 * eta_kernel(1, {0.2, 0, 0}, 3)));
}

TEST_CASE("incidence_count on single pairs") {
    for (int d : {2, 3}) {
        for (double off : {0.0, 0.3, 0.9}) {
            const double w = 0.05;
            Point p = d == 3 ? Point::of(0.5, 0.5, 0.5) : Point::of(0.5, 0.5);
            Vec3 dir = d == 3 ? normalized({1, 2, 0.5}) : normalized({1, 2, 0});
            Vec3 nrm = d == 3 ? normalized(cross(dir, {0, 0, 1})) : Vec3{-dir.y, dir.x, 0};
            Vec3 b = p.v + off * w * nrm;
            Line l(Point{b, d}, dir);
            double I = incidence_count(w, {p}, {l});
            double ref = fine_pair(w, p, l);
            CHECK(I == doctest::Approx(ref).epsilon(1e-3));
            CHECK(normalized_b(w, {p}, {l}) == doctest::Approx(I / std::pow(w, d - 1)));
        }
    }
    Line far(Point::of(0, 0, 0), {1, 0, 0});
    CHECK(incidence_count(0.05, {Point::of(0.5, 0.5, 0.5)}, {far}) == 0.0);
    CHECK_THROWS_AS(normalized_b(0.1, {}, {far}), EmptyConfiguration);
}

TEST_CASE("random incidences normalize to order one") {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
        auto P = random_points(2000, 3, seed);
        auto L = random_lines(2000, 3, seed);
        double B = normalized_b(0.05, P, L);
        MESSAGE("random B(0.05) = ", B);
        CHECK(B >= 0.25);
        CHECK(B <= 4);
        // small scale perturbation moves B a little
        double B2 = normalized_b(0.05 * 1.001, P, L);
        CHECK(std::abs(B2 - B) <= 0.05 * B);
    }
}

TEST_CASE("separated families give zero") {
    std::vector<Point> P;
    std::vector<Line> L;
    for (int i = 0; i < 10; ++i) P.push_back(Point::of(0.1 * i, 0.0, 0.0));
    for (int i = 0; i < 10; ++i) L.push_back(Line(Point::of(0.0, 0.5, 0.1 * i), {1, 0, 0.2}));
    double mind = 1e9;
    for (auto& p : P)
        for (auto& l : L) mind = std::min(mind, point_line_distance(p, l));
    const double w = mind / 6.01;
    CHECK(incidence_count(w, P, L) == 0.0);
}

TEST_CASE("sharp examples") {
    std::vector<double> ds, bush3, bush2, plane;
    for (int k = 4; k <= 7; ++k) {
        double delta = std::ldexp(1.0, -k);
        ds.push_back(delta);
        auto b3 = generate_bush(delta, 3, 1, 0);
        bush3.push_back(normalized_b(delta, b3.points, b3.lines));
        auto b2 = generate_bush(delta, 2, 1, 0);
        bush2.push_back(normalized_b(delta, b2.points, b2.lines));
        auto pl = generate_plane_example(delta, 0);
        plane.push_back(normalized_b(delta, pl.points, pl.lines));
    }
    double s3 = loglog_slope(ds, bush3), s2 = loglog_slope(ds, bush2), sp = loglog_slope(ds, plane);
    MESSAGE("bush slopes ", s3, " ", s2, " plane slope ", sp);
    CHECK(s3 == doctest::Approx(-2).epsilon(0.15));
    CHECK(s2 == doctest::Approx(-1).epsilon(0.3));
    CHECK(sp == doctest::Approx(-1).epsilon(0.3));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(bush3[i] * std::pow(ds[i], 2) >= 1.0 / 8);
        CHECK(bush3[i] * std::pow(ds[i], 2) <= 8);
        CHECK(plane[i] * ds[i] >= 1.0 / 8);
        CHECK(plane[i] * ds[i] <= 8);
    }
}

TEST_CASE("basic high-low matches the 2D sharp examples") {
    for (int k = 4; k <= 7; ++k) {
        double delta = std::ldexp(1.0, -k);
        auto b = generate_bush(delta, 2, 1, 0);
        double lhs = std::pow(normalized_b(delta, b.points, b.lines) - normalized_b(2 * delta, b.points, b.lines), 2);
        double ratio = lhs / rhs_basic(delta, b.points, b.lines);
        CHECK(ratio >= 1e-2);
        CHECK(ratio <= 1e2);

        // dual: one line, about 1/delta points on it
        Line l0(Point::of(0.1, 0.2), {1, 0.5, 0});
        std::vector<Point> P;
        int n = static_cast<int>(std::round(1 / delta));
        for (int i = 0; i < n; ++i) {
            Vec3 x = l0.at(0.8 * i / n);
            P.push_back(Point::of(x.x, x.y));
        }
        std::vector<Line> L{l0};
        double lhs2 = std::pow(normalized_b(delta, P, L) - normalized_b(2 * delta, P, L), 2);
        double r2 = lhs2 / rhs_basic(delta, P, L);
        MESSAGE("delta=", delta, " bush ratio ", ratio, " collinear ratio ", r2);
        CHECK(r2 >= 1e-2);
        CHECK(r2 <= 1e2);
    }
    auto P = random_points(1500, 3, 5);
    auto L = random_lines(1500, 3, 6);
    const double delta = 1.0 / 32;
    double lhs = std::pow(normalized_b(delta, P, L) - normalized_b(2 * delta, P, L), 2);
    double rhs = rhs_basic(delta, P, L);
    MESSAGE("random: lhs ", lhs, " rhs ", rhs);
    CHECK(lhs * 10 <= rhs);
}

TEST_CASE("refined bound") {
    const double delta = 1.0 / 16;
    auto V = generate_vertical(delta, 3);
    auto P = V.points();
    auto L = V.lines();
    auto r = rhs_refined(delta, P, L);
    double b = rhs_basic(delta, P, L);
    MESSAGE("vertical refined ", r.value, " at u=", r.u, " basic ", b);
    CHECK(r.value <= b);
    CHECK(rhs_refined(delta, P, L).u == r.u);

    auto RP = random_points(800, 3, 1);
    auto RL = random_lines(800, 3, 2);
    auto rr = rhs_refined(delta, RP, RL);
    double rb = rhs_basic(delta, RP, RL);
    MESSAGE("isotropic refined ", rr.value, " basic ", rb);
    CHECK(rr.value <= 16 * rb);
    CHECK(rr.value * 16 >= rb);
}

TEST_CASE("direction-limited bound") {
    const double delta = 1.0 / 16;
    auto V = generate_vertical(delta, 3);
    auto P = V.points();
    auto L = V.lines();
    double M = static_cast<double>(m_lines(L, delta, delta));
    CHECK(rhs_direction_limited(delta, P, L, 1, 0, M) == doctest::Approx(rhs_basic(delta, P, L)));
    double nu = delta * delta;
    double shrunk = rhs_direction_limited(delta, P, L, nu, 1.0, M);
    CHECK(shrunk == doctest::Approx(std::pow(nu, 0.25) * rhs_basic(delta, P, L)));

    auto pl = generate_plane_example(delta, 0);
    double Mp = static_cast<double>(m_lines(pl.lines, delta, delta));
    CHECK_THROWS_AS(rhs_direction_limited(delta, pl.points, pl.lines, 1, 1.0, Mp), HypothesisViolation);
}

TEST_CASE("well-spaced bound") {
    CHECK(wellspaced_alpha(1, 1) == doctest::Approx(0.75));
    for (double g : {0.0, 0.3, 1.0}) CHECK(wellspaced_alpha(1 + g, 2 - g) == doctest::Approx(0.5 + g / 6));

    const double delta = 1.0 / 16;
    auto X = random_configuration(600, 3, 12);
    auto P = X.points();
    auto L = X.lines();
    double A = static_cast<double>(m_points(P, delta)) / (std::pow(delta, 3) * P.size());
    double C0 = uniformity_constant(L, delta);
    double K = katz_tao_constant(L, delta, 1, 1);
    auto r = rhs_wellspaced(delta, P, L, 1, 1, K, A, C0);
    MESSAGE("well-spaced: lhs ", r.lhs, " rhs ", r.value, " A=", A, " C0=", C0, " K=", K);
    CHECK(r.lhs <= 1e3 * r.value);
    CHECK_THROWS_AS(rhs_wellspaced(delta, P, L, 1, 1, K / 2, A, C0), HypothesisViolation);
}

TEST_CASE("dyadic_scan") {
    auto P = random_points(500, 3, 3);
    auto L = random_lines(500, 3, 4);
    auto two = dyadic_scan(P, L, 0.125, 0.25);
    REQUIRE(two.rows.size() == 2);
    CHECK(two.rows[1].diff == doctest::Approx(std::abs(two.rows[0].B - two.rows[1].B)));

    auto rep = dyadic_scan(P, L, 0.004, 0.25);
    CHECK(rep.rows.size() == 6);
    double tel = 0;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].w < rep.rows[i - 1].w);
        tel += rep.rows[i].diff;
    }
    CHECK(tel >= std::abs(rep.rows.front().B - rep.rows.back().B) - 1e-12);
    for (auto& r : rep.rows) {
        CHECK(std::isfinite(r.B));
        CHECK(r.B >= 0);
        CHECK(r.rhs_refined <= 16 * r.rhs_basic);
    }
    // point-line configuration with d(X) >= delta: only incident pairs see B(delta/6)
    const double delta = 1.0 / 16;
    auto V = generate_vertical(delta, 3);
    const double n = static_cast<double>(V.size());
    double I = incidence_count(delta / 6, V.points(), V.lines());
    CHECK(I == doctest::Approx(n * eta_kernel_table(3).phi1(0)));
    double b = normalized_b(delta / 6, V.points(), V.lines());
    CHECK(b <= 36 * 2 / (delta * delta * n));
}

TEST_CASE("initial estimate and double counting") {
    auto V = generate_vertical(1.0 / 16, 3);
    auto ie = initial_estimate_check(V, 0.25);
    CHECK(ie.cover_theta == 1);
    MESSAGE("vertical initial estimate lhs ", ie.lhs, " rhs ", ie.rhs);
    CHECK(ie.slack <= 4);
    auto dc = double_count_check(V, 0.25);
    MESSAGE("vertical double count lhs ", dc.lhs, " rhs ", dc.rhs);
    CHECK(dc.lhs >= dc.rhs);

    Configuration one;
    one.pairs.push_back(V.pairs[0]);
    auto d1 = double_count_check(one, 0.5);
    CHECK(d1.lhs == 1);
    CHECK(d1.rhs == doctest::Approx(0.5));
}
