#include "heilbronn/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "heilbronn/parallel.hpp"
#include "heilbronn/triangles.hpp"

namespace heilbronn {

void AnnealSchedule::validate() const {
    if (!(cooling > 0) || !(cooling < 1)) throw InvalidInput("cooling must lie in (0,1)");
    if (moves_per_epoch < 1 || epochs < 1) throw InvalidInput("move and epoch counts must be at least 1");
    if (!std::isfinite(T0)) throw InvalidInput("initial temperature must be finite");
}

namespace {

bool in_cube(Vec3 p, int d) {
    for (int k = 0; k < d; ++k)
        if (p[k] < 0 || p[k] > 1) return false;
    return true;
}

Vec3 gaussian(Rng& rng, int d) {
    std::normal_distribution<double> N(0, 1);
    Vec3 g{N(rng), N(rng), 0};
    if (d == 3) g.z = N(rng);
    return g;
}

// Metropolis on a maximized bottleneck; equal values pass with probability 1/2.
bool accept(double now, double cur, double T, Rng& rng) {
    std::uniform_real_distribution<double> U(0, 1);
    if (now > cur) return true;
    if (now == cur) return U(rng) < 0.5;
    return T > 0 && U(rng) < std::exp((now - cur) / T);
}

struct DxState {
    int d;
    std::size_t n;
    std::vector<Vec3> p, v;
    std::vector<double> D;  // D[i n + j] = dist(p_i, line j)
    std::vector<double> rowmin;

    double pl(std::size_t i, std::size_t j) const {
        Vec3 q = p[i] - p[j];
        return norm(q - dot(q, v[j]) * v[j]);
    }
    void row_min(std::size_t i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) m = std::min(m, D[i * n + j]);
        rowmin[i] = m;
    }
    void init() {
        D.assign(n * n, 0);
        rowmin.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) D[i * n + j] = pl(i, j);
        for (std::size_t i = 0; i < n; ++i) row_min(i);
    }
    double objective() const { return *std::min_element(rowmin.begin(), rowmin.end()); }
    // the two pairs attaining the minimum
    std::pair<std::size_t, std::size_t> critical() const {
        std::size_t i = static_cast<std::size_t>(std::min_element(rowmin.begin(), rowmin.end()) - rowmin.begin());
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && D[i * n + j] == rowmin[i]) return {i, j};
        return {i, i};
    }
    // rescore everything touching pair k after p[k], v[k] changed
    void update(std::size_t k) {
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) D[k * n + j] = pl(k, j);
        row_min(k);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            double old = D[i * n + k], now = pl(i, k);
            D[i * n + k] = now;
            if (now < rowmin[i]) rowmin[i] = now;
            else if (old == rowmin[i] && now > old) row_min(i);
        }
    }
};

Vec3 unit_dir(Vec3 v, int d) {
    if (d == 2) v.z = 0;
    return normalized(v);
}

}  // namespace

DxAnnealResult anneal_max_dx(std::size_t n, int d, const AnnealSchedule& s, const Configuration* init) {
    s.validate();
    if (n < 2) throw InvalidInput("anneal_max_dx needs n >= 2");
    if (d != 2 && d != 3) throw DimensionMismatch("dimension must be 2 or 3");
    Rng rng(s.seed);
    std::uniform_real_distribution<double> U(0, 1);
    DxState st{d, n, {}, {}, {}, {}};
    if (init) {
        if (init->size() != n || init->dim != d) throw InvalidInput("initial configuration does not match n and d");
        for (auto& pr : init->pairs) st.p.push_back(pr.p.v), st.v.push_back(pr.l.dir());
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            st.p.push_back(random_point(rng, d).v);
            st.v.push_back(random_direction(rng, d));
        }
    }
    st.init();
    const double scale = 1 / (2 * std::pow(static_cast<double>(n), 1.0 / (d - 1)));
    const double T0 = s.T0 > 0 ? s.T0 : 0.1 * scale;
    double cur = st.objective(), best = cur;
    std::vector<Vec3> bp = st.p, bv = st.v;
    DxAnnealResult res;
    std::normal_distribution<double> N(0, 1);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> orow(n), ocol(n), omin(n);
    auto crit = st.critical();
    double T = T0;
    for (std::size_t e = 0; e < s.epochs; ++e, T *= s.cooling) {
        const double sigma = std::max(1e-4, 0.1 * std::sqrt(T / T0));
        for (std::size_t m = 0; m < s.moves_per_epoch; ++m) {
            // half the moves go to the bottleneck pair
            const double who = U(rng);
            const std::size_t k = who < 0.25 ? crit.first : who < 0.5 ? crit.second : pick(rng);
            const Vec3 op = st.p[k], ov = st.v[k];
            const double kind = U(rng);
            if (kind < 0.3) {
                st.p[k] = op + (sigma * N(rng)) * ov;  // slide along the line
            } else if (kind < 0.6) {
                st.v[k] = unit_dir(ov + sigma * gaussian(rng, d), d);
            } else if (kind < 0.9) {
                st.p[k] = op + sigma * gaussian(rng, d);
            } else {
                st.p[k] = random_point(rng, d).v;
                st.v[k] = random_direction(rng, d);
            }
            if (!in_cube(st.p[k], d)) {
                st.p[k] = op, st.v[k] = ov;
                continue;
            }
            // save what update() touches
            std::copy(st.D.begin() + k * n, st.D.begin() + (k + 1) * n, orow.begin());
            omin = st.rowmin;
            for (std::size_t i = 0; i < n; ++i) ocol[i] = st.D[i * n + k];
            st.update(k);
            const double now = st.objective();
            if (accept(now, cur, T, rng)) {
                cur = now;
                ++res.accepted;
                crit = st.critical();
                if (cur > best) best = cur, bp = st.p, bv = st.v;
            } else {
                st.p[k] = op, st.v[k] = ov;
                std::copy(orow.begin(), orow.end(), st.D.begin() + k * n);
                for (std::size_t i = 0; i < n; ++i) st.D[i * n + k] = ocol[i];
                std::copy(omin.begin(), omin.end(), st.rowmin.begin());
            }
        }
        res.best_trace.push_back(best);
    }
    res.X.dim = d;
    res.X.provenance = "anneal_max_dx seed=" + std::to_string(s.seed);
    for (std::size_t i = 0; i < n; ++i) {
        Point pt{bp[i], d};
        res.X.pairs.push_back(PointLinePair::make(pt, Line(pt, bv[i])));
    }
    res.dx = min_config_distance(res.X);
    return res;
}

TriangleAnnealResult anneal_max_triangle(std::size_t n, int d, const AnnealSchedule& s, const std::vector<Point>* init) {
    s.validate();
    if (n < 3) throw InvalidInput("anneal_max_triangle needs n >= 3");
    if (d != 2 && d != 3) throw DimensionMismatch("dimension must be 2 or 3");
    Rng rng(s.seed);
    std::vector<Point> P;
    if (init) {
        if (init->size() != n) throw InvalidInput("initial point set does not have n points");
        for (auto& p : *init) require_same_dim(d, p.dim);
        P = *init;
    } else {
        for (std::size_t i = 0; i < n; ++i) P.push_back(random_point(rng, d));
    }
    TriangleWitness cur = min_triangle_fast(P);
    TriangleWitness best = cur;
    std::vector<Point> bestP = P;

    auto min_with = [&](std::size_t k) {
        TriangleWitness w{{0, 0, 0}, std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (i == k || j == k) continue;
                std::array<std::size_t, 3> t{i, j, k};
                std::sort(t.begin(), t.end());
                TriangleWitness c{t, triangle_area(P, t[0], t[1], t[2])};
                if (witness_less(c, w)) w = c;
            }
        return w;
    };
    auto min_without = [&](std::size_t k) {
        TriangleWitness w{{0, 0, 0}, std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t l = j + 1; l < n; ++l) {
                    if (i == k || j == k || l == k) continue;
                    TriangleWitness c{{i, j, l}, triangle_area(P, i, j, l)};
                    if (witness_less(c, w)) w = c;
                }
        return w;
    };

    const double T0 = s.T0 > 0 ? s.T0 : 0.1 / (static_cast<double>(n) * static_cast<double>(n));
    TriangleAnnealResult res;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> U(0, 1);
    double T = T0;
    for (std::size_t e = 0; e < s.epochs; ++e, T *= s.cooling) {
        const double sigma = std::max(1e-4, 0.1 * std::sqrt(T / T0));
        for (std::size_t m = 0; m < s.moves_per_epoch; ++m) {
            // half the moves go to the smallest triangle
            const double who = U(rng);
            const std::size_t k = who < 0.5 ? cur.idx[static_cast<std::size_t>(who * 6)] : pick(rng);
            const Point old = P[k];
            Vec3 q = old.v + sigma * gaussian(rng, d);
            for (int a = 0; a < d; ++a) q[a] = std::clamp(q[a], 0.0, 1.0);
            P[k].v = q;
            const bool involved = cur.idx[0] == k || cur.idx[1] == k || cur.idx[2] == k;
            TriangleWitness rest = involved ? min_without(k) : cur;
            TriangleWitness with = min_with(k);
            TriangleWitness now = witness_less(with, rest) ? with : rest;
            if (accept(now.area, cur.area, T, rng)) {
                cur = now;
                ++res.accepted;
                if (cur.area > best.area) best = cur, bestP = P;
            } else {
                P[k] = old;
            }
        }
        res.best_trace.push_back(best.area);
    }
    res.P = bestP;
    res.area = min_triangle_fast(bestP).area;
    return res;
}

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidInput("ladder and values differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) lx.push_back(std::log(x[i])), ly.push_back(std::log(y[i]));
    if (lx.size() < 3) throw InvalidInput("log-log fit needs at least 3 valid rungs");
    const double k = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= k, my /= k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my), syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0) throw InvalidInput("ladder has a single distinct value");
    ExponentFit f;
    f.ladder = x, f.value = y;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1 : sxy * sxy / (sxx * syy);
    if (!std::isfinite(f.slope)) throw NumericalFailure("non-finite slope");
    return f;
}

namespace {

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !(x > 0) || !std::isfinite(x); }), v.end());
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double cell_value(const std::string& family, double x, std::uint64_t seed, std::size_t rung, const ExponentOptions& opt) {
    const int d = opt.dim;
    AnnealSchedule s = opt.schedule;
    s.seed = seed * 1000003ULL + rung;
    if (family == "vertical") return static_cast<double>(generate_vertical(x, d).size());
    if (family == "pipeline") {
        auto n = static_cast<std::size_t>(std::llround(x));
        return triangle_via_pointline(random_points(n, d, seed)).area;
    }
    if (family == "anneal-tri") return anneal_max_triangle(static_cast<std::size_t>(std::llround(x)), d, s).area;
    if (family == "anneal-dx") {
        // largest n reaching d(X) >= delta: doubling from the vertical count,
        // then bisection down to a step of c0/8
        const double c0 = std::pow(std::floor(1 / (2 * x) + 1e-9), d - 1);
        auto reaches = [&](std::size_t n) {
            AnnealSchedule sn = s;
            sn.moves_per_epoch = std::max(s.moves_per_epoch, opt.moves_per_pair * n);  // fixed per-pair effort
            return anneal_max_dx(n, d, sn).dx >= x;
        };
        std::size_t lo = 0, hi = static_cast<std::size_t>(std::max(2.0, c0));
        while (reaches(hi)) lo = hi, hi *= 2;
        const auto gran = static_cast<std::size_t>(std::max(1.0, std::floor(c0 / 8)));
        if (lo == 0) lo = 1;
        while (hi - lo > gran) {
            std::size_t mid = lo + (hi - lo) / 2;
            (reaches(mid) ? lo : hi) = mid;
        }
        return lo >= 2 ? static_cast<double>(lo) : 0.0;
    }
    throw InvalidInput("unknown exponent family '" + family + "'");
}

}  // namespace

ExponentFit exponent_estimate(const std::string& family, const std::vector<double>& ladder,
                              const std::vector<std::uint64_t>& seeds, const ExponentOptions& opt) {
    if (ladder.size() < 3) throw InvalidInput("exponent estimate needs at least 3 rungs");
    if (seeds.empty()) throw InvalidInput("no seeds");
    if (family != "vertical" && family != "pipeline" && family != "anneal-tri" && family != "anneal-dx")
        throw InvalidInput("unknown exponent family '" + family + "'");
    const std::size_t R = ladder.size(), S = seeds.size();
    std::vector<double> cell(R * S, 0);
    std::vector<char> fresh(R * S, 0);
    parallel_for(R * S, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t c = b; c < e; ++c) {
            const std::size_t r = c / S;
            const std::uint64_t seed = seeds[c % S];
            if (opt.cache) {
                auto it = opt.cache->find({r, seed});
                if (it != opt.cache->end()) {
                    cell[c] = it->second;
                    continue;
                }
            }
            cell[c] = cell_value(family, ladder[r], seed, r, opt);
            fresh[c] = 1;
        }
    });
    if (opt.cache)
        for (std::size_t c = 0; c < R * S; ++c)
            if (fresh[c]) (*opt.cache)[{c / S, seeds[c % S]}] = cell[c];
    std::vector<double> med(R);
    std::vector<std::vector<double>> samples(R);
    for (std::size_t r = 0; r < R; ++r) {
        samples[r].assign(cell.begin() + r * S, cell.begin() + (r + 1) * S);
        med[r] = median(samples[r]);
    }
    ExponentFit f = fit_loglog(ladder, med);
    f.family = family;
    f.samples = std::move(samples);
    return f;
}

}  // namespace heilbronn
