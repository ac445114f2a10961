#include "heilbronn/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace heilbronn {

std::vector<double> dyadic_ladder(double hi, double lo) {
    if (!(lo > 0) || !(hi >= lo)) throw InvalidInput("dyadic ladder needs 0 < lo <= hi");
    std::vector<double> out;
    for (double w = hi;; w /= 2) {
        out.push_back(w);
        if (w <= lo * (1 + 1e-12)) break;
    }
    return out;
}

std::size_t m_points(const std::vector<Point>& P, double w) {
    if (!(w > 0)) throw InvalidInput("cube side must be positive");
    if (P.empty()) return 0;
    const int d = P[0].dim;
    std::size_t best = 0;
    std::unordered_map<std::uint64_t, std::size_t> cnt;
    for (int mask = 0; mask < (1 << d); ++mask) {
        cnt.clear();
        for (auto& p : P) {
            std::uint64_t key = 0;
            for (int k = 0; k < d; ++k) {
                double s = (mask >> k & 1) ? w / 2 : 0.0;
                auto c = static_cast<std::int64_t>(std::floor((p.v[k] - s) / w)) + (1 << 20);
                key = key << 21 | (static_cast<std::uint64_t>(c) & 0x1fffff);
            }
            best = std::max(best, ++cnt[key]);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// line concentration

LineIndex::LineIndex(std::vector<Line> lines) : lines_(std::move(lines)) {
    if (!lines_.empty()) dim_ = lines_[0].dim();
    for (auto& l : lines_) require_same_dim(l.dim(), dim_);
    G_ = static_cast<long>(std::lround(2.0 / cell_));
    std::vector<std::size_t> cnt(G_ * G_ * G_ + 1, 0);
    std::vector<long> key(lines_.size());
    auto c = [&](double x) { return std::clamp(static_cast<long>(std::floor((x + 1) / cell_)), 0L, G_ - 1); };
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        Vec3 v = lines_[i].dir();
        key[i] = (c(v.x) * G_ + c(v.y)) * G_ + c(v.z);
        ++cnt[key[i] + 1];
    }
    for (std::size_t i = 1; i < cnt.size(); ++i) cnt[i] += cnt[i - 1];
    start_ = cnt;
    items_.resize(lines_.size());
    for (std::size_t i = 0; i < lines_.size(); ++i) items_[cnt[key[i]]++] = i;
}

void LineIndex::near_direction(Vec3 e, double tau, std::vector<std::size_t>& out) const {
    out.clear();
    if (tau >= 2) {
        out.resize(lines_.size());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return;
    }
    auto c = [&](double x) { return std::clamp(static_cast<long>(std::floor((x + 1) / cell_)), 0L, G_ - 1); };
    for (double sgn : {1.0, -1.0}) {
        Vec3 t = sgn * e;
        long lo[3], hi[3];
        for (int k = 0; k < 3; ++k) lo[k] = c(t[k] - tau), hi[k] = c(t[k] + tau);
        for (long a = lo[0]; a <= hi[0]; ++a)
            for (long b = lo[1]; b <= hi[1]; ++b)
                for (long z = lo[2]; z <= hi[2]; ++z) {
                    long f = (a * G_ + b) * G_ + z;
                    for (std::size_t s = start_[f]; s < start_[f + 1]; ++s) {
                        std::size_t i = items_[s];
                        if (direction_distance(lines_[i].dir(), e) <= tau) out.push_back(i);
                    }
                }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

// chordal direction tolerance for lines crossing a box over half its length
static double direction_tolerance(double transverse, double half_long) {
    double s = transverse / half_long;
    if (s >= 1) return 2.0;
    return std::sqrt(std::max(0.0, 2 - 2 * std::sqrt(1 - s * s))) + 1e-9;
}

std::size_t LineIndex::count_in(const Box& b) const {
    std::vector<std::size_t> cand;
    near_direction(b.frame[2], direction_tolerance(2 * std::hypot(b.half[0], b.half[1]), b.half[2]), cand);
    std::size_t c = 0;
    for (auto i : cand) c += line_box_chord(lines_[i], b) >= b.half[2] - 1e-12;
    return c;
}

// chord of l inside [0,1]^d, midpoint; false if l misses the cube
static bool cube_chord_mid(const Line& l, Vec3& mid) {
    double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < l.dim(); ++k) {
        double p = l.base().v[k], q = l.dir()[k];
        if (std::abs(q) < 1e-15) {
            if (p < 0 || p > 1) return false;
            continue;
        }
        double a = -p / q, b = (1 - p) / q;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a), t1 = std::min(t1, b);
    }
    if (!(t1 > t0)) return false;
    mid = l.at((t0 + t1) / 2);
    return true;
}

LineConcentration LineIndex::max_box(double u, double w) const {
    if (!(u > 0) || !(w > 0)) throw InvalidInput("box scales must be positive");
    if (u > w) throw InvalidInput("m_lines needs u <= w");
    if (w > 1 + 1e-12) throw InvalidInput("m_lines needs w <= 1");
    w = std::min(w, 1.0);
    LineConcentration best;
    const std::size_t n = lines_.size();
    if (n == 0) return best;
    const bool planar = dim_ == 2;
    const double wbox = planar ? 1.0 : w;
    const double tau = direction_tolerance(2 * std::hypot(u, planar ? 0.0 : w), 0.5);

    // estimate work and thin out anchors to stay within budget
    double frac = 1;
    if (tau < 2) {
        double s = std::min(1.0, 2 * std::hypot(u, planar ? 0.0 : w) / 0.5 * 0.5);
        double phi = std::asin(s);
        frac = planar ? std::min(1.0, 2 * phi / 3.14159) : std::min(1.0, 1 - std::cos(phi));
    }
    const double orients = planar || u == w ? 1 : 8;
    const double work = static_cast<double>(n) * 2 * orients * std::max(1.0, frac * n);
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(work / work_budget)));

    std::vector<std::size_t> cand;
    std::vector<Vec3> normals;
    for (std::size_t a = 0; a < n; a += stride) {
        ++best.anchors_used;
        const Line& la = lines_[a];
        const Vec3 e = la.dir();
        near_direction(e, tau, cand);

        std::vector<Vec3> centers{la.base().v};
        Vec3 mid;
        if (cube_chord_mid(la, mid) && dist(mid, la.base().v) > 1e-9) centers.push_back(mid);

        normals.clear();
        auto add_normal = [&](Vec3 nrm) {
            nrm = nrm - dot(nrm, e) * e;
            if (norm(nrm) < 1e-9) return;
            nrm = normalized(nrm);
            for (auto& q : normals)
                if (std::abs(dot(q, nrm)) > 1 - 1e-9) return;
            normals.push_back(nrm);
        };
        if (planar) {
            add_normal({-e.y, e.x, 0});
        } else if (u == w) {
            add_normal(any_orthogonal(e));
        } else {
            add_normal({1, 0, 0});
            add_normal({0, 1, 0});
            add_normal({0, 0, 1});
            // planes through the anchor and its nearest neighbours
            std::vector<std::pair<double, std::size_t>> near;
            for (auto i : cand)
                if (i != a) near.push_back({line_metric(la, lines_[i]), i});
            std::size_t keep = std::min<std::size_t>(near.size(), 3);
            std::partial_sort(near.begin(), near.begin() + keep, near.end());
            for (std::size_t k = 0; k < keep; ++k) {
                const Line& lc = lines_[near[k].second];
                add_normal(cross(e, lc.dir()));
                Vec3 q = lc.project(la.base().v);
                add_normal(cross(e, q - la.base().v));
            }
        }

        for (auto& c : centers)
            for (auto& nrm : normals) {
                Box b = Box::make(c, e, nrm, u, wbox, 1.0);
                std::size_t cnt = 0;
                for (auto i : cand) cnt += line_box_chord(lines_[i], b) >= 0.5 - 1e-12;
                if (cnt > best.count) best.count = cnt, best.box = b;
            }
    }
    return best;
}

LineConcentration m_lines_box(const std::vector<Line>& L, double u, double w) { return LineIndex(L).max_box(u, w); }

std::size_t m_lines(const std::vector<Line>& L, double u, double w) { return m_lines_box(L, u, w).count; }

std::size_t m_config(const Configuration& X, double u, double v, double w) {
    if (!(u > 0) || !(v > 0) || !(w > 0)) throw InvalidInput("scales must be positive");
    std::size_t best = 0;
    for (std::size_t a = 0; a < X.size(); ++a) {
        const auto& A = X.pairs[a];
        std::size_t c = 0;
        for (const auto& B : X.pairs)
            c += dist(A.p.v, B.p.v) <= u && direction_distance(A.l.dir(), B.l.dir()) <= v && line_metric(A.l, B.l) <= w;
        best = std::max(best, c);
    }
    return best;
}

std::vector<CoveringRow> covering_profiles(const Configuration& X, const std::vector<double>& ladder) {
    std::vector<CoveringRow> rows;
    auto P = X.points();
    auto L = X.lines();
    auto D = X.directions();
    const double n = static_cast<double>(std::max<std::size_t>(1, X.size()));
    for (double w : ladder) {
        CoveringRow r;
        r.w = w;
        r.points = covering_number(P, w);
        r.lines = covering_number(L, w);
        r.dirs = covering_number_directions(D, w);
        if (!X.empty()) {
            r.mx_points = m_config(X, w, 1, 1);
            r.mx_lines = m_config(X, 1, 1, w);
            r.mx_dirs = m_config(X, 1, w, 1);
        }
        r.ratio_points = r.points * static_cast<double>(r.mx_points) / n;
        r.ratio_lines = r.lines * static_cast<double>(r.mx_lines) / n;
        r.ratio_dirs = r.dirs * static_cast<double>(r.mx_dirs) / n;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Katz-Tao diagnostics

static std::vector<double> scale_grid(double delta) {
    if (!(delta > 0) || delta > 1) throw InvalidInput("delta must lie in (0,1]");
    // powers of two anchored at 1, ascending
    std::vector<double> s;
    for (double x = 1; x >= delta * (1 - 1e-12); x /= 2) s.push_back(x);
    std::reverse(s.begin(), s.end());
    return s;
}

// small dense least squares via normal equations
static std::vector<double> least_squares(const std::vector<std::vector<double>>& A, const std::vector<double>& y) {
    const std::size_t p = A[0].size();
    std::vector<std::vector<double>> N(p, std::vector<double>(p + 1, 0));
    for (std::size_t r = 0; r < A.size(); ++r)
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) N[i][j] += A[r][i] * A[r][j];
            N[i][p] += A[r][i] * y[r];
        }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(N[r][c]) > std::abs(N[piv][c])) piv = r;
        std::swap(N[c], N[piv]);
        if (std::abs(N[c][c]) < 1e-12) throw InvalidInput("degenerate regression design");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            double f = N[r][c] / N[c][c];
            for (std::size_t k = c; k <= p; ++k) N[r][k] -= f * N[c][k];
        }
    }
    std::vector<double> x(p);
    for (std::size_t i = 0; i < p; ++i) x[i] = N[i][p] / N[i][i];
    return x;
}

KatzTaoFit katz_tao_fit(const std::vector<Line>& L, double delta) {
    if (L.empty()) throw InvalidInput("no lines");
    LineIndex idx(L);
    KatzTaoFit fit;
    fit.dim = idx.dim();
    auto s = scale_grid(delta);
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (fit.dim == 2) {
            fit.cells.push_back({s[a], 1.0, idx.max_box(s[a], 1.0).count, 0});
            continue;
        }
        for (std::size_t b = a; b < s.size(); ++b) fit.cells.push_back({s[a], s[b], idx.max_box(s[a], s[b]).count, 0});
    }
    std::vector<std::vector<double>> A;
    std::vector<double> y;
    for (auto& c : fit.cells) {
        if (c.count < 2) continue;
        if (fit.dim == 2) A.push_back({1.0, std::log(c.u / delta)});
        else A.push_back({1.0, std::log(c.u / delta), std::log(c.w / delta)});
        y.push_back(std::log(static_cast<double>(c.count)));
    }
    fit.populated = y.size();
    if (fit.populated < 4) throw InvalidInput("degenerate grid: fewer than 4 populated cells");
    auto x = least_squares(A, y);
    fit.C = std::exp(x[0]);
    fit.t1 = x[1];
    fit.t2 = fit.dim == 3 ? x[2] : 0;
    for (auto& c : fit.cells) {
        double pred = x[0] + fit.t1 * std::log(c.u / delta) + (fit.dim == 3 ? fit.t2 * std::log(c.w / delta) : 0);
        c.residual = std::log(static_cast<double>(std::max<std::size_t>(c.count, 1))) - pred;
    }
    return fit;
}

double katz_tao_constant(const std::vector<Line>& L, double delta, double t1, double t2) {
    if (L.empty()) return 0;
    LineIndex idx(L);
    auto s = scale_grid(delta);
    double K = 0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (idx.dim() == 2) {
            K = std::max(K, idx.max_box(s[a], 1.0).count / std::pow(s[a] / delta, t1));
            continue;
        }
        for (std::size_t b = a; b < s.size(); ++b)
            K = std::max(K, idx.max_box(s[a], s[b]).count / (std::pow(s[a] / delta, t1) * std::pow(s[b] / delta, t2)));
    }
    return K;
}

PlaneReport plane_reduction_check(const Configuration& X, double delta, double gamma) {
    require_same_dim(X.dim, 3);
    PlaneReport rep;
    rep.delta = delta;
    rep.gamma = gamma;
    rep.dx = X.size() >= 2 ? min_config_distance(X) : std::numeric_limits<double>::infinity();
    rep.precondition_ok = rep.dx >= delta;
    LineIndex idx(X.lines());
    for (double w = 1; w >= delta; w /= 2)
        for (double u = w; u * w >= delta * (1 - 1e-12); u /= 2) {
            PlaneRow r;
            r.u = u, r.w = w;
            auto lc = idx.max_box(u, w);
            r.measured = lc.count;
            r.bound = std::pow(delta, -3) * std::pow(u, 1 + gamma) * std::pow(w, 2 - gamma);
            r.ratio = r.measured / r.bound;
            auto slab = slab_restriction(X, lc.box);
            r.slab_pairs = slab.config.size();
            r.slab_separation = slab.config.size() >= 2 ? min_config_distance(slab.config) : 0;
            r.slab_bound = std::pow(u / w, -2 + gamma);
            rep.fitted_constant = std::max(rep.fitted_constant, r.ratio);
            rep.rows.push_back(r);
        }
    return rep;
}

// ---------------------------------------------------------------------------
// uniformization

namespace {

struct LevelTable {
    std::size_t n = 0;
    int m = 0;
    std::vector<std::uint8_t> lp, lt, ll;  // how many ladder scales each distance fits under

    LevelTable(const Configuration& X, const std::vector<double>& scales) : n(X.size()), m(static_cast<int>(scales.size())) {
        lp.assign(n * n, 0), lt.assign(n * n, 0), ll.assign(n * n, 0);
        auto level = [&](double d) {
            int l = 0;
            while (l < m && d <= scales[l]) ++l;
            return static_cast<std::uint8_t>(l);
        };
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x; y < n; ++y) {
                const auto& A = X.pairs[x];
                const auto& B = X.pairs[y];
                std::uint8_t a = level(dist(A.p.v, B.p.v));
                std::uint8_t b = level(direction_distance(A.l.dir(), B.l.dir()));
                std::uint8_t c = level(line_metric(A.l, B.l));
                lp[x * n + y] = lp[y * n + x] = a;
                lt[x * n + y] = lt[y * n + x] = b;
                ll[x * n + y] = ll[y * n + x] = c;
            }
    }

    // counts[x][(i*m+j)*m+k] for scales i,j,k (0-based), over alive y
    void counts(const std::vector<std::size_t>& alive, std::vector<std::vector<std::uint32_t>>& out) const {
        const int M1 = m + 1;
        out.assign(alive.size(), std::vector<std::uint32_t>(static_cast<std::size_t>(m) * m * m, 0));
        std::vector<std::uint32_t> H(static_cast<std::size_t>(M1) * M1 * M1);
        for (std::size_t a = 0; a < alive.size(); ++a) {
            std::fill(H.begin(), H.end(), 0);
            std::size_t x = alive[a];
            for (auto y : alive) {
                std::size_t o = x * n + y;
                ++H[(lp[o] * M1 + lt[o]) * M1 + ll[o]];
            }
            // suffix sums along each axis
            for (int i = m - 1; i >= 0; --i)
                for (int j = 0; j <= m; ++j)
                    for (int k = 0; k <= m; ++k) H[(i * M1 + j) * M1 + k] += H[((i + 1) * M1 + j) * M1 + k];
            for (int i = 0; i <= m; ++i)
                for (int j = m - 1; j >= 0; --j)
                    for (int k = 0; k <= m; ++k) H[(i * M1 + j) * M1 + k] += H[(i * M1 + j + 1) * M1 + k];
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= m; ++j)
                    for (int k = m - 1; k >= 0; --k) H[(i * M1 + j) * M1 + k] += H[(i * M1 + j) * M1 + k + 1];
            for (int i = 1; i <= m; ++i)
                for (int j = 1; j <= m; ++j)
                    for (int k = 1; k <= m; ++k)
                        out[a][((i - 1) * m + (j - 1)) * m + (k - 1)] = H[(i * M1 + j) * M1 + k];
        }
    }
};

}  // namespace

Uniformized uniformize(const Configuration& X, double K, double delta, const UniformizeOptions& opt) {
    if (!(K > 1)) throw InvalidInput("uniformization needs K > 1");
    if (!(delta > 0) || delta >= 1) throw InvalidInput("delta must lie in (0,1)");
    if (X.empty()) throw EmptyConfiguration("nothing to uniformize");
    const int m = static_cast<int>(std::floor(std::log(1 / delta) / std::log(K) + 1e-9));
    std::vector<double> scales;
    for (int i = 1; i <= m; ++i) scales.push_back(std::pow(K, -i));

    Uniformized out;
    out.cert.K = K;
    out.cert.scales = scales;
    out.cert.input_size = X.size();
    out.cert.separation_enforced = opt.enforce_separation;
    out.cert.separation_constant = opt.separation_constant;

    std::vector<std::size_t> alive(X.size());
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    const std::size_t T = static_cast<std::size_t>(m) * m * m;

    if (m >= 1) {
        LevelTable tab(X, scales);
        std::vector<std::vector<std::uint32_t>> C;
        auto separate = [&]() {
            // keep the densest residue class of cubes at each scale, so kept
            // cubes are C_d * scale apart
            const long q = static_cast<long>(std::ceil(opt.separation_constant)) + 1;
            bool changed = false;
            for (double s : scales) {
                std::map<std::array<long, 3>, std::vector<std::size_t>> cls;
                for (auto x : alive) {
                    auto c = cube_index(X.pairs[x].p.v, s, X.dim);
                    for (auto& v : c) v %= q;
                    cls[c].push_back(x);
                }
                auto bestc = std::max_element(cls.begin(), cls.end(),
                                              [](auto& a, auto& b) { return a.second.size() < b.second.size(); });
                if (bestc->second.size() != alive.size()) changed = true;
                alive = bestc->second;
            }
            return changed;
        };
        while (true) {
            while (true) {
                ++out.cert.rounds;
                tab.counts(alive, C);
                std::vector<std::uint32_t> M(T, 0);
                for (auto& c : C)
                    for (std::size_t t = 0; t < T; ++t) M[t] = std::max(M[t], c[t]);
                std::size_t worst = 0;
                double wr = 2;
                for (std::size_t t = 0; t < T; ++t) {
                    std::uint32_t mn = M[t];
                    for (auto& c : C) mn = std::min(mn, c[t]);
                    double r = static_cast<double>(mn) / M[t];
                    if (r < wr) wr = r, worst = t;
                }
                if (wr >= 1.0 / K) break;
                // keep the largest dyadic bucket of the worst triple's counts
                std::map<int, std::vector<std::size_t>> bucket;
                for (std::size_t a = 0; a < alive.size(); ++a)
                    bucket[static_cast<int>(std::floor(std::log2(static_cast<double>(C[a][worst]))))].push_back(alive[a]);
                auto pick = bucket.begin();
                for (auto it = bucket.begin(); it != bucket.end(); ++it)
                    if (it->second.size() >= pick->second.size()) pick = it;
                alive = pick->second;
            }
            if (!opt.enforce_separation || !separate()) break;
        }
        tab.counts(alive, C);
        std::vector<std::uint32_t> M(T, 0);
        for (auto& c : C)
            for (std::size_t t = 0; t < T; ++t) M[t] = std::max(M[t], c[t]);
        out.cert.worst_ratio.assign(T, 1.0);
        for (std::size_t t = 0; t < T; ++t)
            for (auto& c : C) out.cert.worst_ratio[t] = std::min(out.cert.worst_ratio[t], static_cast<double>(c[t]) / M[t]);
    }
    out.cert.min_ratio = out.cert.worst_ratio.empty()
                             ? 1.0
                             : *std::min_element(out.cert.worst_ratio.begin(), out.cert.worst_ratio.end());
    if (alive.empty()) throw EmptyConfiguration("uniformization removed every pair");
    std::sort(alive.begin(), alive.end());
    out.kept = alive;
    out.X.dim = X.dim;
    out.X.provenance = X.provenance + " uniformized";
    for (auto x : alive) out.X.pairs.push_back(X.pairs[x]);
    out.cert.output_size = alive.size();
    return out;
}

double uniformity_ratio(const Configuration& X, const std::vector<double>& scales) {
    const std::size_t m = scales.size();
    if (m == 0 || X.empty()) return 1.0;
    const std::size_t T = m * m * m;
    std::vector<std::vector<std::size_t>> cnt(X.size(), std::vector<std::size_t>(T, 0));
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < X.size(); ++y) {
            double dp = dist(X.pairs[x].p.v, X.pairs[y].p.v);
            double dt = direction_distance(X.pairs[x].l.dir(), X.pairs[y].l.dir());
            double dl = line_metric(X.pairs[x].l, X.pairs[y].l);
            for (std::size_t i = 0; i < m && dp <= scales[i]; ++i)
                for (std::size_t j = 0; j < m && dt <= scales[j]; ++j)
                    for (std::size_t k = 0; k < m && dl <= scales[k]; ++k) ++cnt[x][(i * m + j) * m + k];
        }
    double worst = 1;
    for (std::size_t t = 0; t < T; ++t) {
        std::size_t mx = 0, mn = SIZE_MAX;
        for (auto& c : cnt) mx = std::max(mx, c[t]), mn = std::min(mn, c[t]);
        worst = std::min(worst, static_cast<double>(mn) / mx);
    }
    return worst;
}

std::vector<double> direction_profile(const Configuration& X, double w, double delta, std::size_t anchor) {
    if (!(w > 0 && w < 1)) throw InvalidInput("profile scale must lie in (0,1)");
    const int J = static_cast<int>(std::floor(std::log(delta) / std::log(w) + 1e-9));
    std::vector<double> beta;
    for (int j = 0; j <= J; ++j) {
        Configuration Xj;
        try {
            Xj = rescale_config(X, std::pow(w, j), anchor);
        } catch (const EmptyConfiguration&) {
            break;
        }
        double c = static_cast<double>(covering_number_directions(Xj.directions(), w));
        beta.push_back(2 + std::log(c) / std::log(w));
    }
    return beta;
}

}  // namespace heilbronn
