#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "heilbronn/config.hpp"
#include "heilbronn/multiscale.hpp"

using namespace heilbronn;

namespace {

Configuration from_points_lines(const PointsLines& pl) {
    Configuration X;
    X.dim = pl.dim;
    for (std::size_t i = 0; i < std::min(pl.points.size(), pl.lines.size()); ++i)
        X.pairs.push_back(PointLinePair::make(pl.lines[i].base(), pl.lines[i]));
    return X;
}

// exact max over axis-parallel w-squares: lower corner coordinates drawn from the points
std::size_t exact_square_max(const std::vector<Point>& P, double w) {
    std::size_t best = 0;
    for (auto& a : P)
        for (auto& b : P) {
            std::size_t c = 0;
            for (auto& p : P)
                c += p.v.x >= a.v.x && p.v.x <= a.v.x + w && p.v.y >= b.v.y && p.v.y <= b.v.y + w;
            best = std::max(best, c);
        }
    return best;
}

std::size_t point_anchored_max(const std::vector<Point>& P, double w) {
    std::size_t best = 0;
    for (auto& a : P) {
        std::size_t c = 0;
        for (auto& p : P) {
            bool in = true;
            for (int k = 0; k < a.dim; ++k) in = in && p.v[k] >= a.v[k] && p.v[k] <= a.v[k] + w;
            c += in;
        }
        best = std::max(best, c);
    }
    return best;
}

std::vector<Vec3> fibonacci_hemisphere(int n) {
    std::vector<Vec3> out;
    const double ga = M_PI * (3 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = (i + 0.5) / n;
        double r = std::sqrt(1 - z * z);
        out.push_back({r * std::cos(ga * i), r * std::sin(ga * i), z});
    }
    return out;
}

// coarse dense net of oriented boxes
std::size_t dense_net_max(const std::vector<Line>& L, double u, double w) {
    std::size_t best = 0;
    auto dirs = fibonacci_hemisphere(100);
    for (double cx = 0; cx <= 1; cx += 0.25)
        for (double cy = 0; cy <= 1; cy += 0.25)
            for (double cz = 0; cz <= 1; cz += 0.25)
                for (auto& e : dirs) {
                    Vec3 a = any_orthogonal(e), b = cross(e, a);
                    for (int k = 0; k < 6; ++k) {
                        double t = M_PI * k / 6;
                        Box box = Box::make({cx, cy, cz}, e, std::cos(t) * a + std::sin(t) * b, u, w, 1.0);
                        std::size_t c = 0;
                        for (auto& l : L) c += line_box_chord(l, box) >= 0.5 - 1e-12;
                        best = std::max(best, c);
                    }
                }
    return best;
}

}  // namespace

TEST_CASE("dyadic_ladder") {
    auto l = dyadic_ladder(0.25, 0.004);
    REQUIRE(l.size() == 7);
    CHECK(l.front() == 0.25);
    CHECK(l.back() == 0.25 / 64);
}

TEST_CASE("m_points") {
    std::vector<Point> same(17, Point::of(0.3, 0.4, 0.5));
    CHECK(m_points(same, 0.01) == 17);

    std::vector<Point> grid;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int k = 0; k < 8; ++k) grid.push_back(Point::of(i / 8.0 + 0.01, j / 8.0 + 0.02, k / 8.0 + 0.03));
    CHECK(m_points(grid, 1.0 / 8) <= 8);

    auto P2 = random_points(500, 2, 21);
    std::size_t ours = m_points(P2, 0.1), exact = exact_square_max(P2, 0.1);
    MESSAGE("2D m_points ", ours, " exact ", exact);
    CHECK(ours <= exact);
    CHECK(ours * 4 >= exact);

    auto P3 = random_points(500, 3, 22);
    std::size_t o3 = m_points(P3, 0.1), a3 = point_anchored_max(P3, 0.1);
    CHECK(o3 * 8 >= a3);
    CHECK_THROWS_AS(m_points(P3, 0), InvalidInput);
}

TEST_CASE("m_lines on structured families") {
    const double delta = 1.0 / 16;
    auto pl = generate_plane_example(delta, 3);
    auto lc = m_lines_box(pl.lines, delta, 1.0);
    MESSAGE("plane example: ", lc.count, " of ", pl.lines.size(), " lines in one slab");
    CHECK(lc.count >= 0.8 * pl.lines.size());
    CHECK(LineIndex(pl.lines).count_in(lc.box) == lc.count);

    auto b3 = generate_bush(0.1, 3, 1, 0);
    CHECK(m_lines(b3.lines, 1.0, 1.0) >= b3.lines.size());
    auto b2 = generate_bush(0.1, 2, 1, 0);
    CHECK(m_lines(b2.lines, 1.0, 1.0) >= b2.lines.size());

    // parallel lines through a grid: a u x w x 1 box holds about (u/delta)(w/delta)
    auto V = generate_vertical(delta, 3);
    CHECK(m_lines(V.lines(), delta / 2, delta / 2) == 1);
    CHECK(m_lines(V.lines(), 0.25, 0.25) <= 16);
    CHECK_THROWS_AS(m_lines(V.lines(), 0.5, 0.25), InvalidInput);
}

TEST_CASE("m_lines against a dense box net") {
    auto L = random_lines(200, 3, 77);
    for (auto [u, w] : {std::pair{0.25, 0.5}, std::pair{0.125, 0.25}, std::pair{0.5, 0.5}}) {
        std::size_t ours = m_lines(L, u, w), net = dense_net_max(L, u, w);
        MESSAGE("u=", u, " w=", w, " anchored search ", ours, " dense net ", net);
        CHECK(ours * 16 >= net);
    }
}

TEST_CASE("m_lines scale monotonicity") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto L = random_lines(200, 3, 900 + seed);
        LineIndex idx(L);
        std::vector<double> s{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
        std::map<std::pair<int, int>, std::size_t> M;
        for (int a = 0; a < 5; ++a)
            for (int b = a; b < 5; ++b) M[{a, b}] = idx.max_box(s[a], s[b]).count;
        for (auto& [k1, m1] : M)
            for (auto& [k2, m2] : M) {
                if (k2.first < k1.first || k2.second < k1.second) continue;
                double ru = s[k2.first] / s[k1.first], rw = s[k2.second] / s[k1.second];
                CHECK(m2 <= 64 * ru * ru * rw * rw * std::max<std::size_t>(m1, 1));
                ++checked;
            }
    }
    CHECK(checked > 100);
}

TEST_CASE("m_config") {
    auto X = random_configuration(150, 3, 31);
    Configuration one;
    one.dim = 3;
    one.pairs.push_back(X.pairs[0]);
    CHECK(m_config(one, 0.01, 0.01, 0.01) == 1);
    // diameters of the point, direction and line spaces are below 2, 2 and 4
    CHECK(m_config(X, 2, 2, 4) == X.size());

    Rng rng(5);
    std::uniform_real_distribution<double> U(0.01, 1.0);
    for (int q = 0; q < 100; ++q) {
        double u = U(rng), v = U(rng), w = U(rng);
        CHECK(m_config(X, u, v, w) == m_config(X, u, std::min(v, w), w));
    }

    // Lipschitz in the scales
    auto Y = random_configuration(300, 3, 32);
    int bad = 0;
    for (double u : {0.125, 0.25})
        for (double v : {0.125, 0.25})
            for (double w : {0.125, 0.25}) {
                std::size_t base = m_config(Y, u, v, w);
                for (double A : {1.0, 2.0, 4.0})
                    for (double B : {1.0, 2.0})
                        for (double C : {1.0, 2.0, 4.0}) {
                            double lhs = m_config(Y, A * u, B * v, C * w);
                            double rhs = 64 * std::pow(A, 3) * std::pow(B, 2) * std::pow(C, 4) * base;
                            bad += lhs > rhs;
                        }
            }
    CHECK(bad == 0);
}

TEST_CASE("covering_profiles") {
    auto V = generate_vertical(1.0 / 16, 3);
    auto rows = covering_profiles(V, {1.0, 0.5, 0.25, 0.125});
    for (auto& r : rows) CHECK(r.dirs == 1);
    CHECK(rows[2].points == covering_number(V.points(), 0.25));
    CHECK(rows[0].mx_lines == V.size());
}

TEST_CASE("katz_tao_fit") {
    const double delta = 1.0 / 32;
    auto V = generate_vertical(delta, 3);
    auto fv = katz_tao_fit(V.lines(), delta);
    MESSAGE("vertical fit t1=", fv.t1, " t2=", fv.t2, " C=", fv.C);
    auto small = std::find_if(fv.cells.begin(), fv.cells.end(), [&](auto& c) { return c.u == delta && c.w == delta; });
    REQUIRE(small != fv.cells.end());
    CHECK(small->count == 1);
    CHECK(fv.C <= 2);
    CHECK(fv.t1 + fv.t2 == doctest::Approx(2).epsilon(0.25));

    auto pl = generate_plane_example(delta, 1);
    auto fp = katz_tao_fit(pl.lines, delta);
    MESSAGE("plane fit t1=", fp.t1, " t2=", fp.t2, " C=", fp.C);
    CHECK(fp.populated >= 4);
    // a slab containing the plane catches every line, whatever its thickness
    for (double u = delta; u <= 1; u *= 2) CHECK(m_lines(pl.lines, u, 1.0) == pl.lines.size());
    CHECK(fp.t1 == doctest::Approx(0).epsilon(0.05));

    // point concentration shows up as a poor fit
    auto b = generate_bush(delta, 3, 1, 4);
    auto fb = katz_tao_fit(b.lines, delta);
    double worst = 0;
    for (auto& c : fb.cells) worst = std::max(worst, std::abs(c.residual));
    MESSAGE("bush worst residual ", worst);
    CHECK(worst > 0.5);

    std::vector<Line> one{V.lines()[0]};
    CHECK_THROWS_AS(katz_tao_fit(one, delta), InvalidInput);

    CHECK(katz_tao_constant(V.lines(), delta, 1, 1) <= 2);
}

TEST_CASE("plane_reduction_check") {
    const double delta = 1.0 / 16;
    auto V = generate_vertical(delta, 3);
    auto rep = plane_reduction_check(V, delta, 0);
    CHECK(rep.precondition_ok);
    MESSAGE("vertical fitted constant ", rep.fitted_constant);
    CHECK(rep.fitted_constant <= 10);
    CHECK_FALSE(rep.rows.empty());

    auto bad = from_points_lines(generate_plane_example(delta));
    // coplanar crossing lines put points close to other lines
    auto r2 = plane_reduction_check(bad, delta, 0);
    CHECK_FALSE(r2.precondition_ok);
}

TEST_CASE("uniformize") {
    const double delta = 1.0 / 64;
    // homogeneous input: a full grid of parallel lines
    auto V = generate_vertical(1.0 / 16, 3);
    auto uv = uniformize(V, 4, 1.0 / 16);
    CHECK(uv.cert.valid());
    CHECK(uv.X.size() == V.size());

    auto X = random_configuration(400, 3, 8);
    double K = std::pow(delta, -0.1);
    auto u = uniformize(X, K, delta);
    MESSAGE("random: kept ", u.X.size(), " of ", X.size(), " in ", u.cert.rounds, " rounds, m=", u.cert.scales.size());
    CHECK(u.cert.valid());
    CHECK(uniformity_ratio(u.X, u.cert.scales) == doctest::Approx(u.cert.min_ratio));
    CHECK(u.X.size() >= 1);

    // half clustered, half background
    Configuration H;
    H.dim = 3;
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
        Point p = random_point(rng, 3);
        if (i % 2) p = Point::of(0.5 + 0.02 * p.v.x, 0.5 + 0.02 * p.v.y, 0.5 + 0.02 * p.v.z);
        H.pairs.push_back(PointLinePair::make(p, Line(p, random_direction(rng, 3))));
    }
    auto uh = uniformize(H, 4, delta);
    CHECK(uh.cert.valid());
    CHECK(uniformity_ratio(uh.X, uh.cert.scales) >= 0.25 - 1e-12);
    std::size_t clustered = 0;
    for (auto k : uh.kept) clustered += k % 2;
    MESSAGE("half-clustered: kept ", uh.X.size(), ", clustered ", clustered);
    CHECK(uh.X.size() >= 10);

    auto us = uniformize(X, 4, 1.0 / 16, {true, 4});
    CHECK(us.cert.separation_enforced);
    CHECK(us.cert.valid());

    CHECK_THROWS_AS(uniformize(X, 1.0, delta), InvalidInput);
}

TEST_CASE("direction_profile") {
    const double delta = 1.0 / 16;
    auto V = generate_vertical(delta, 3);
    for (double b : direction_profile(V, 0.5, delta, 0)) CHECK(b == doctest::Approx(2.0));

    auto X = random_configuration(2000, 3, 3);
    auto beta = direction_profile(X, 0.25, delta, 0);
    REQUIRE(!beta.empty());
    MESSAGE("isotropic beta_0 ", beta[0]);
    CHECK(beta[0] <= 0.5);
}
