#include "heilbronn/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace heilbronn {

PointLinePair PointLinePair::make(Point p, const Line& l) {
    require_same_dim(p.dim, l.dim());
    double d = point_line_distance(p, l);
    if (d > 1e-6) throw InvalidInput("point is not on its line (distance " + std::to_string(d) + ")");
    p.v = l.project(p.v);
    if (p.dim == 2) p.v.z = 0;
    return {p, l};
}

std::vector<Point> Configuration::points() const {
    std::vector<Point> out;
    out.reserve(pairs.size());
    for (auto& pr : pairs) out.push_back(pr.p);
    return out;
}

std::vector<Line> Configuration::lines() const {
    std::vector<Line> out;
    out.reserve(pairs.size());
    for (auto& pr : pairs) out.push_back(pr.l);
    return out;
}

std::vector<Vec3> Configuration::directions() const {
    std::vector<Vec3> out;
    out.reserve(pairs.size());
    for (auto& pr : pairs) out.push_back(pr.l.dir());
    return out;
}

DxWitness min_config_distance_witness(const Configuration& X) {
    const std::size_t n = X.size();
    if (n < 2) throw InvalidInput("d(X) needs at least two pairs");
    DxWitness best{std::numeric_limits<double>::infinity(), 0, 0};
    for (std::size_t j = 0; j < n; ++j) {
        const Line& l = X.pairs[j].l;
        const Vec3 b = l.base().v, v = l.dir();
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            Vec3 d = X.pairs[i].p.v - b;
            double dd = norm2(d - dot(d, v) * v);
            if (dd < best.value) best = {dd, i, j};
        }
    }
    best.value = point_line_distance(X.pairs[best.i].p, X.pairs[best.j].l);
    return best;
}

double min_config_distance(const Configuration& X) { return min_config_distance_witness(X).value; }

std::vector<std::string> validate_configuration(const Configuration& X, double tol) {
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto& pr = X.pairs[i];
        std::string tag = "pair " + std::to_string(i) + ": ";
        if (pr.p.dim != X.dim || pr.l.dim() != X.dim) bad.push_back(tag + "dimension mismatch");
        for (int k = 0; k < X.dim; ++k)
            if (!(pr.p.v[k] >= -tol && pr.p.v[k] <= 1 + tol)) bad.push_back(tag + "coordinate out of [0,1]");
        if (point_line_distance(pr.p, pr.l) > tol) bad.push_back(tag + "point off its line");
        if (std::abs(norm(pr.l.dir()) - 1) > 1e-12) bad.push_back(tag + "direction not unit");
    }
    return bad;
}

Configuration generate_vertical(double delta, int d) {
    if (d != 2 && d != 3) throw InvalidInput("dimension must be 2 or 3");
    if (!(delta > 0)) throw InvalidInput("delta must be positive");
    if (delta >= 0.5) throw EmptyConfiguration("vertical construction needs delta < 1/2");
    const long n = static_cast<long>(std::floor(1.0 / (2 * delta) + 1e-9));
    Configuration X;
    X.dim = d;
    X.provenance = "vertical delta=" + std::to_string(delta);
    Vec3 up = d == 2 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
    auto coord = [n](long k) { return (k + 0.5) / static_cast<double>(n); };
    if (d == 2) {
        for (long i = 0; i < n; ++i) {
            Point p = Point::of(coord(i), 0.0);
            X.pairs.push_back(PointLinePair::make(p, Line(p, up)));
        }
    } else {
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                Point p = Point::of(coord(i), coord(j), 0.0);
                X.pairs.push_back(PointLinePair::make(p, Line(p, up)));
            }
    }
    return X;
}

Point random_point(Rng& rng, int d) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double x = U(rng), y = U(rng);
    if (d == 2) return Point::of(x, y);
    return Point::of(x, y, U(rng));
}

Vec3 random_direction(Rng& rng, int d) {
    if (d == 2) {
        std::uniform_real_distribution<double> A(0.0, std::numbers::pi);
        double a = A(rng);
        return {std::cos(a), std::sin(a), 0};
    }
    std::normal_distribution<double> N(0.0, 1.0);
    while (true) {
        Vec3 v{N(rng), N(rng), N(rng)};
        if (norm(v) > 1e-9) return normalized(v);
    }
}

std::vector<Point> random_points(std::size_t n, int d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(rng, d));
    return out;
}

std::vector<Line> random_lines(std::size_t n, int d, std::uint64_t seed) {
    Rng rng(seed ^ 0x5bd1e995ULL);
    std::vector<Line> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point p = random_point(rng, d);
        out.emplace_back(p, random_direction(rng, d));
    }
    return out;
}

Configuration random_configuration(std::size_t n, int d, std::uint64_t seed) {
    Rng rng(seed);
    Configuration X;
    X.dim = d;
    X.provenance = "random seed=" + std::to_string(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Point p = random_point(rng, d);
        X.pairs.push_back(PointLinePair::make(p, Line(p, random_direction(rng, d))));
    }
    return X;
}

PointsLines generate_bush(double delta, int d, int n_bushes, std::uint64_t seed) {
    if (d != 2 && d != 3) throw InvalidInput("dimension must be 2 or 3");
    if (!(delta > 0) || delta > 0.1) throw InvalidInput("bush needs delta in (0, 0.1]");
    if (n_bushes < 1) throw InvalidInput("need at least one bush");
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.25, 0.75);
    PointsLines out;
    out.dim = d;
    std::vector<Vec3> dirs;
    if (d == 2) {
        long N = static_cast<long>(std::ceil(1.0 / delta - 1e-9));
        for (long k = 0; k < N; ++k) {
            double a = std::numbers::pi * k / N;
            dirs.push_back({std::cos(a), std::sin(a), 0});
        }
    } else {
        // Fibonacci net on the upper hemisphere; spacing ~ sqrt(2 pi / N) > delta
        long N = static_cast<long>(std::ceil(1.0 / (delta * delta) - 1e-9));
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (long k = 0; k < N; ++k) {
            double z = (k + 0.5) / N, r = std::sqrt(1 - z * z), phi = golden * k;
            dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
    }
    for (int b = 0; b < n_bushes; ++b) {
        Point c = d == 2 ? Point::of(U(rng), U(rng)) : Point::of(U(rng), U(rng), U(rng));
        out.points.push_back(c);
        for (auto v : dirs) out.lines.emplace_back(c, v);
    }
    return out;
}

PointsLines generate_plane_example(double delta, std::uint64_t seed) {
    if (!(delta > 0) || delta >= 0.5) throw InvalidInput("plane example needs delta in (0, 1/2)");
    const long k = static_cast<long>(std::floor(1.0 / delta + 1e-9));
    PointsLines out;
    out.dim = 3;
    for (long i = 0; i < k; ++i)
        for (long j = 0; j < k; ++j) out.points.push_back(Point::of((i + 0.5) / k, (j + 0.5) / k, 0.5));
    // lines through the central quarter so each crosses the plane square for length >= 1/2
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.25, 0.75), A(0.0, std::numbers::pi);
    for (long i = 0; i < k * k; ++i) {
        double a = A(rng);
        out.lines.emplace_back(Point::of(U(rng), U(rng), 0.5), Vec3{std::cos(a), std::sin(a), 0});
    }
    return out;
}

PointsLines generate_st_grid(int N) {
    if (N < 8) throw InvalidInput("grid family needs N >= 8");
    int n = 1;
    while (static_cast<long>(n + 1) * (n + 1) * (n + 1) <= N) ++n;
    PointsLines out;
    out.dim = 2;
    const double sx = 1.0 / (n + 1), sy = 1.0 / (2.0 * n * n + 1);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= 2 * n * n; ++j) out.points.push_back(Point::of(i * sx, j * sy));
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n * n; ++b) {
            // y = a x + b in grid units; base at grid x = 0
            Point base = Point::of(0.0, b * sy);
            out.lines.emplace_back(base, Vec3{sx, a * sy, 0});
        }
    return out;
}

static bool is_prime(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

std::vector<Point> generate_erdos_parabola(int n) {
    if (n < 3) throw InvalidInput("parabola construction needs n >= 3");
    long p = n;
    while (!is_prime(p)) ++p;
    std::vector<Point> out;
    for (long i = 0; i < n; ++i)
        out.push_back(Point::of(static_cast<double>(i) / p, static_cast<double>((i * i) % p) / p));
    return out;
}

std::array<long, 3> cube_index(Vec3 q, double delta, int d) {
    const long top = static_cast<long>(std::ceil(1.0 / delta - 1e-9)) - 1;
    std::array<long, 3> idx{0, 0, 0};
    for (int k = 0; k < d; ++k) idx[k] = std::clamp(static_cast<long>(std::floor(q[k] / delta)), 0L, top);
    return idx;
}

Configuration rescale_config(const Configuration& X, double delta, std::size_t anchor) {
    if (anchor >= X.size()) throw InvalidInput("anchor is not a member of the configuration");
    if (!(delta > 0) || delta > 1) throw InvalidInput("rescaling scale must lie in (0,1]");
    const int d = X.dim;
    auto key = cube_index(X.pairs[anchor].p.v, delta, d);
    Vec3 corner{key[0] * delta, key[1] * delta, d == 3 ? key[2] * delta : 0.0};
    Configuration out;
    out.dim = d;
    out.provenance = X.provenance;
    for (const auto& pr : X.pairs) {
        if (cube_index(pr.p.v, delta, d) != key) continue;
        Point q = pr.p;
        q.v = (1.0 / delta) * (pr.p.v - corner);
        if (d == 2) q.v.z = 0;
        out.pairs.push_back({q, Line(q, pr.l.dir())});
    }
    if (out.empty()) throw EmptyConfiguration("rescaled configuration is empty");
    return out;
}

SlabRestriction slab_restriction(const Configuration& X, const Box& box) {
    require_same_dim(X.dim, 3);
    SlabRestriction out;
    out.config.dim = 2;
    out.config.provenance = X.provenance + " slab";
    const Vec3 e1 = box.frame[1], e2 = box.frame[2];
    const double s1 = 1.0 / (2 * box.half[1]), s2 = 1.0 / (2 * box.half[2]);
    for (const auto& pr : X.pairs) {
        if (!box.contains(pr.p.v, 1e-12)) continue;
        if (line_box_chord(pr.l, box) < box.half[2] - 1e-12) continue;
        Vec3 rel = pr.p.v - box.center;
        Point q = Point::of(std::clamp(dot(rel, e1) * s1 + 0.5, 0.0, 1.0), std::clamp(dot(rel, e2) * s2 + 0.5, 0.0, 1.0));
        Vec3 v{dot(pr.l.dir(), e1) * s1, dot(pr.l.dir(), e2) * s2, 0};
        if (norm(v) < 1e-12) {
            ++out.dropped;
            continue;
        }
        out.config.pairs.push_back({q, Line(q, v)});
    }
    return out;
}

}  // namespace heilbronn
