#include "heilbronn/triangles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "heilbronn/config.hpp"

namespace heilbronn {

bool witness_less(const TriangleWitness& a, const TriangleWitness& b) {
    if (a.area != b.area) return a.area < b.area;
    return a.idx < b.idx;
}

double triangle_area(const std::vector<Point>& P, std::size_t i, std::size_t j, std::size_t k) {
    std::array<std::size_t, 3> s{i, j, k};
    std::sort(s.begin(), s.end());
    const Vec3 a = P[s[0]].v, b = P[s[1]].v, c = P[s[2]].v;
    return 0.5 * norm(cross(b - a, c - a));
}

static TriangleWitness make_witness(const std::vector<Point>& P, std::size_t i, std::size_t j, std::size_t k) {
    TriangleWitness w;
    w.idx = {i, j, k};
    std::sort(w.idx.begin(), w.idx.end());
    w.area = triangle_area(P, i, j, k);
    return w;
}

static void check_input(const std::vector<Point>& P) {
    if (P.size() < 3) throw InvalidInput("need at least three points");
    for (auto& p : P) require_same_dim(p.dim, P[0].dim);
}

TriangleWitness min_triangle_brute(const std::vector<Point>& P) {
    check_input(P);
    const std::size_t n = P.size();
    TriangleWitness best = make_witness(P, 0, 1, 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                TriangleWitness w{{i, j, k}, triangle_area(P, i, j, k)};
                if (witness_less(w, best)) best = w;
            }
    return best;
}

namespace {

// Uniform bucket grid over the bounding box of a point set.
struct BucketGrid {
    int dim = 3;
    Vec3 lo{};
    double h = 1;
    std::array<long, 3> G{1, 1, 1};
    std::vector<std::size_t> start, items;

    BucketGrid(const std::vector<Point>& P, double cell) {
        dim = P[0].dim;
        Vec3 hi = P[0].v;
        lo = P[0].v;
        for (auto& p : P)
            for (int k = 0; k < 3; ++k) lo[k] = std::min(lo[k], p.v[k]), hi[k] = std::max(hi[k], p.v[k]);
        h = cell;
        for (int k = 0; k < dim; ++k) G[k] = std::max(1L, static_cast<long>(std::floor((hi[k] - lo[k]) / h)) + 1);
        std::vector<std::size_t> cnt(G[0] * G[1] * G[2] + 1, 0);
        std::vector<long> cid(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) cid[i] = cell_of(P[i].v), ++cnt[cid[i] + 1];
        for (std::size_t c = 1; c < cnt.size(); ++c) cnt[c] += cnt[c - 1];
        start = cnt;
        items.resize(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) items[cnt[cid[i]]++] = i;
    }
    long coord(double x, int k) const {
        return std::clamp(static_cast<long>(std::floor((x - lo[k]) / h)), 0L, G[k] - 1);
    }
    long cell_of(Vec3 q) const { return (coord(q.x, 0) * G[1] + coord(q.y, 1)) * G[2] + coord(q.z, 2); }
    long flat(long a, long b, long c) const { return (a * G[1] + b) * G[2] + c; }
};

}  // namespace

TriangleWitness min_triangle_fast(const std::vector<Point>& P) {
    check_input(P);
    const std::size_t n = P.size();
    const int d = P[0].dim;
    const double cell = std::max(1e-12, 1.0 / std::ceil(std::pow(static_cast<double>(n), 1.0 / d)));
    BucketGrid g(P, cell);

    // incumbent from triples among nearby points
    TriangleWitness best = make_witness(P, 0, 1, 2);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> near;
        long ci[3] = {g.coord(P[i].v.x, 0), g.coord(P[i].v.y, 1), g.coord(P[i].v.z, 2)};
        for (long a = std::max(0L, ci[0] - 1); a <= std::min(g.G[0] - 1, ci[0] + 1); ++a)
            for (long b = std::max(0L, ci[1] - 1); b <= std::min(g.G[1] - 1, ci[1] + 1); ++b)
                for (long c = std::max(0L, ci[2] - 1); c <= std::min(g.G[2] - 1, ci[2] + 1); ++c) {
                    long f = g.flat(a, b, c);
                    for (std::size_t s = g.start[f]; s < g.start[f + 1]; ++s)
                        if (g.items[s] != i) near.push_back({dist(P[i].v, P[g.items[s]].v), g.items[s]});
                }
        std::size_t keep = std::min<std::size_t>(near.size(), 6);
        std::partial_sort(near.begin(), near.begin() + keep, near.end());
        for (std::size_t x = 0; x < keep; ++x)
            for (std::size_t y = x + 1; y < keep; ++y) {
                auto w = make_witness(P, i, near[x].second, near[y].second);
                if (witness_less(w, best)) best = w;
            }
    }

    // every pair (i,j): the third vertex of a better triangle lies within
    // 2A/|ij| of the line ij; scan only the buckets that can hold it
    auto consider = [&](std::size_t i, std::size_t j, std::size_t k) {
        if (k == i || k == j) return;
        double a = triangle_area(P, i, j, k);
        if (a > best.area) return;
        TriangleWitness w;
        w.idx = {i, j, k};
        std::sort(w.idx.begin(), w.idx.end());
        w.area = a;
        if (witness_less(w, best)) best = w;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec3 dir = P[j].v - P[i].v;
            double L = norm(dir);
            if (L == 0) {
                for (std::size_t k = 0; k < n; ++k) consider(i, j, k);
                continue;
            }
            dir = (1.0 / L) * dir;
            double r = 2 * best.area / L * (1 + 1e-9) + 1e-12;
            int ax = 0;
            for (int k = 1; k < d; ++k)
                if (std::abs(dir[k]) > std::abs(dir[ax])) ax = k;
            int o1 = (ax + 1) % 3, o2 = (ax + 2) % 3;
            for (long s = 0; s < g.G[ax]; ++s) {
                double x0 = g.lo[ax] + s * g.h - r, x1 = g.lo[ax] + (s + 1) * g.h + r;
                // range of the other coordinates along the line for x in [x0, x1]
                double lo1, hi1, lo2, hi2;
                {
                    double t0 = (x0 - P[i].v[ax]) / dir[ax], t1 = (x1 - P[i].v[ax]) / dir[ax];
                    if (!std::isfinite(t0) || !std::isfinite(t1)) {
                        lo1 = lo2 = -std::numeric_limits<double>::infinity();
                        hi1 = hi2 = std::numeric_limits<double>::infinity();
                    } else {
                        double a1 = P[i].v[o1] + t0 * dir[o1], b1 = P[i].v[o1] + t1 * dir[o1];
                        double a2 = P[i].v[o2] + t0 * dir[o2], b2 = P[i].v[o2] + t1 * dir[o2];
                        lo1 = std::min(a1, b1) - r, hi1 = std::max(a1, b1) + r;
                        lo2 = std::min(a2, b2) - r, hi2 = std::max(a2, b2) + r;
                    }
                }
                auto range = [&](double lo, double hi, int k, long& a, long& b) {
                    a = std::isfinite(lo) ? g.coord(lo, k) : 0;
                    b = std::isfinite(hi) ? g.coord(hi, k) : g.G[k] - 1;
                    if (hi < g.lo[k]) b = -1;
                };
                long a1, b1, a2, b2;
                range(lo1, hi1, o1, a1, b1);
                range(lo2, hi2, o2, a2, b2);
                for (long c1 = a1; c1 <= b1; ++c1)
                    for (long c2 = a2; c2 <= b2; ++c2) {
                        std::array<long, 3> c{};
                        c[ax] = s, c[o1] = c1, c[o2] = c2;
                        long f = g.flat(c[0], c[1], c[2]);
                        for (std::size_t q = g.start[f]; q < g.start[f + 1]; ++q) consider(i, j, g.items[q]);
                    }
            }
        }
    return best;
}

std::vector<ClosePair> greedy_close_pairs(const std::vector<Point>& P) {
    const std::size_t n = P.size();
    if (n < 8) throw InvalidInput("pairing needs at least 8 points");
    for (auto& p : P) require_same_dim(p.dim, P[0].dim);
    const int d = P[0].dim;
    const double cell = std::max(1e-9, std::pow(static_cast<double>(n), -1.0 / d));
    BucketGrid g(P, cell);
    std::vector<char> alive(n, 1);

    // nearest alive neighbour by expanding rings of buckets
    auto nearest = [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = i;
        long c[3] = {g.coord(P[i].v.x, 0), g.coord(P[i].v.y, 1), g.coord(P[i].v.z, 2)};
        long maxring = std::max({g.G[0], g.G[1], g.G[2]});
        for (long ring = 0; ring <= maxring; ++ring) {
            if (ring >= 1 && (ring - 1) * g.h >= best) break;
            for (long a = c[0] - ring; a <= c[0] + ring; ++a)
                for (long b = c[1] - ring; b <= c[1] + ring; ++b)
                    for (long e = c[2] - ring; e <= c[2] + ring; ++e) {
                        if (std::max({std::abs(a - c[0]), std::abs(b - c[1]), std::abs(e - c[2])}) != ring) continue;
                        if (a < 0 || b < 0 || e < 0 || a >= g.G[0] || b >= g.G[1] || e >= g.G[2]) continue;
                        long f = g.flat(a, b, e);
                        for (std::size_t s = g.start[f]; s < g.start[f + 1]; ++s) {
                            std::size_t j = g.items[s];
                            if (j == i || !alive[j]) continue;
                            double dd = dist(P[i].v, P[j].v);
                            if (dd < best || (dd == best && j < arg)) best = dd, arg = j;
                        }
                    }
        }
        return std::make_pair(best, arg);
    };

    using Entry = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    auto push = [&](std::size_t i) {
        auto [dd, j] = nearest(i);
        if (j != i) pq.push({dd, std::min(i, j), std::max(i, j)});
    };
    for (std::size_t i = 0; i < n; ++i) push(i);
    std::vector<ClosePair> out;
    const std::size_t m = n / 4;
    while (out.size() < m && !pq.empty()) {
        auto [dd, a, b] = pq.top();
        pq.pop();
        if (alive[a] && alive[b]) {
            alive[a] = alive[b] = 0;
            out.push_back({a, b, dd});
            continue;
        }
        if (alive[a]) push(a);
        if (alive[b]) push(b);
    }
    return out;
}

TriangleWitness triangle_via_pointline(const std::vector<Point>& P, PipelineReport* report) {
    auto pairs = greedy_close_pairs(P);
    PipelineReport rep;
    rep.m = pairs.size();
    for (auto& pr : pairs) rep.max_pair_length = std::max(rep.max_pair_length, pr.length);
    for (auto& pr : pairs) {
        if (pr.length == 0) {
            // coincident points: any third point spans a zero-area triangle
            std::size_t k = 0;
            while (k == pr.a || k == pr.b) ++k;
            rep.degenerate_pair = true;
            if (report) *report = rep;
            return make_witness(P, pr.a, pr.b, k);
        }
    }
    Configuration X;
    X.dim = P[0].dim;
    for (auto& pr : pairs) X.pairs.push_back({P[pr.a], Line::through(P[pr.a], P[pr.b])});
    auto dx = min_config_distance_witness(X);
    rep.delta = dx.value;
    rep.implied_bound = rep.max_pair_length * rep.delta / 2;
    if (report) *report = rep;
    return make_witness(P, pairs[dx.i].a, pairs[dx.j].a, pairs[dx.j].b);
}

}  // namespace heilbronn
