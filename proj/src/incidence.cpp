#include "heilbronn/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heilbronn/multiscale.hpp"
#include "heilbronn/parallel.hpp"

namespace heilbronn {

namespace {

template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (!(b > a)) return 0;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

double sphere_area(int d) { return d == 3 ? 4 * M_PI : 2 * M_PI; }

double join(double t) { return 1 - t * t * t * (10 - 15 * t + 6 * t * t); }

double interp(const std::vector<double>& tab, double h, double x) {
    double q = x / h;
    auto i = static_cast<std::size_t>(q);
    if (i + 1 >= tab.size()) return tab.back();
    double f = q - static_cast<double>(i);
    return tab[i] * (1 - f) + tab[i + 1] * f;
}

}  // namespace

double BumpProfile::operator()(double r) const {
    if (r <= r1) return 1;
    if (r >= r2) return 0;
    return join((r - r1) / (r2 - r1));
}

double BumpProfile::integral() const {
    double inner = std::pow(r1, dim) / dim;
    double outer = simpson([&](double r) { return (*this)(r)*std::pow(r, dim - 1); }, r1, r2, 4000);
    return sphere_area(dim) * (inner + outer);
}

static BumpProfile solve_bump(int d) {
    BumpProfile b;
    b.dim = d;
    double lo = b.r1, hi = 2;
    for (int it = 0; it < 200; ++it) {
        b.r2 = (lo + hi) / 2;
        (b.integral() < 1 ? lo : hi) = b.r2;
    }
    b.r2 = (lo + hi) / 2;
    if (std::abs(b.integral() - 1) > 1e-9) throw NumericalFailure("bump normalization did not converge");
    return b;
}

const BumpProfile& bump_profile(int d) {
    require_same_dim(d == 2 ? 2 : 3, d);
    static const BumpProfile b2 = solve_bump(2), b3 = solve_bump(3);
    return d == 2 ? b2 : b3;
}

EtaKernel::EtaKernel(int d, std::size_t n) : dim_(d) {
    const BumpProfile& chi = bump_profile(d);
    const double r2 = chi.r2, R2 = r2 / 2;
    auto f = [&](double s) { return chi(s); };
    auto g = [&](double t) { return std::pow(2.0, d) * chi(2 * t); };
    support_ = r2 + R2;
    if (n % 2) ++n;
    h_ = support_ / static_cast<double>(n);
    eta_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = h_ * static_cast<double>(i);
        const double s0 = std::max(0.0, r - R2), s1 = std::min(r2, r + R2);
        if (d == 3) {
            if (i == 0) {
                eta_[i] = 4 * M_PI * simpson([&](double s) { return s * s * f(s) * g(s); }, 0, R2, 1024);
                continue;
            }
            auto outer = [&](double s) {
                double a = std::abs(r - s), b = std::min(r + s, R2);
                return s * f(s) * simpson([&](double t) { return t * g(t); }, a, b, 64);
            };
            eta_[i] = 2 * M_PI / r * simpson(outer, s0, s1, 256);
        } else {
            auto outer = [&](double s) {
                // angular integral restricted to where g is nonzero
                double A;
                if (r == 0 || s == 0) {
                    A = 2 * M_PI * g(std::max(r, s));
                } else {
                    double c = (r * r + s * s - R2 * R2) / (2 * r * s);
                    if (c >= 1) return 0.0;
                    double pm = c <= -1 ? M_PI : std::acos(c);
                    A = 2 * simpson([&](double p) { return g(std::sqrt(std::max(0.0, r * r + s * s - 2 * r * s * std::cos(p)))); },
                                    0, pm, 64);
                }
                return s * f(s) * A;
            };
            eta_[i] = simpson(outer, s0, s1, 256);
        }
    }
    phi_.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = h_ * static_cast<double>(j);
        const double half = std::sqrt(std::max(0.0, support_ * support_ - t * t));
        phi_[j] = 2 * simpson([&](double s) { return eta1(std::sqrt(s * s + t * t)); }, 0, half, 512);
    }
}

double EtaKernel::eta1(double r) const { return r >= support_ ? 0.0 : interp(eta_, h_, r); }
double EtaKernel::phi1(double t) const { return t >= support_ ? 0.0 : interp(phi_, h_, t); }

double EtaKernel::mass() const {
    const std::size_t n = eta_.size() - 1;
    double s = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        double r = h_ * static_cast<double>(i);
        double wgt = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        s += wgt * eta_[i] * std::pow(r, dim_ - 1);
    }
    return sphere_area(dim_) * s * h_ / 3;
}

const EtaKernel& eta_kernel_table(int d) {
    require_same_dim(d == 2 ? 2 : 3, d);
    if (d == 2) {
        static const EtaKernel k2(2);
        return k2;
    }
    static const EtaKernel k3(3);
    return k3;
}

double eta_kernel(double w, const Vec3& x, int d) {
    if (!(w > 0)) throw InvalidInput("kernel scale must be positive");
    return std::pow(w, -d) * eta_kernel_table(d).eta1(norm(x) / w);
}

// ---------------------------------------------------------------------------

namespace {

// Uniform grid over the points' bounding box.
struct PointGrid {
    Vec3 lo{}, hi{};
    double cell = 1;
    long n[3] = {1, 1, 1};
    std::vector<std::size_t> start, items;

    PointGrid(const std::vector<Point>& P, double min_cell, int d) {
        lo = hi = P[0].v;
        for (auto& p : P)
            for (int k = 0; k < d; ++k) lo[k] = std::min(lo[k], p.v[k]), hi[k] = std::max(hi[k], p.v[k]);
        double ext = 0;
        for (int k = 0; k < d; ++k) ext = std::max(ext, hi[k] - lo[k]);
        cell = std::max({min_cell, ext / 128, 1e-12});
        for (int k = 0; k < d; ++k) n[k] = static_cast<long>(std::floor((hi[k] - lo[k]) / cell)) + 1;
        std::vector<std::size_t> cnt(cells() + 1, 0), key(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) key[i] = index(P[i].v), ++cnt[key[i] + 1];
        for (std::size_t i = 1; i < cnt.size(); ++i) cnt[i] += cnt[i - 1];
        start = cnt;
        items.resize(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) items[cnt[key[i]]++] = i;
    }
    std::size_t cells() const { return static_cast<std::size_t>(n[0] * n[1] * n[2]); }
    long coord(double x, int k) const { return std::clamp(static_cast<long>(std::floor((x - lo[k]) / cell)), 0L, n[k] - 1); }
    std::size_t index(Vec3 v) const { return static_cast<std::size_t>((coord(v.x, 0) * n[1] + coord(v.y, 1)) * n[2] + coord(v.z, 2)); }
};

}  // namespace

double incidence_count(double w, const std::vector<Point>& P, const std::vector<Line>& L) {
    if (!(w > 0)) throw InvalidInput("scale must be positive");
    if (P.empty() || L.empty()) return 0;
    const int d = P[0].dim;
    for (auto& p : P) require_same_dim(d, p.dim);
    for (auto& l : L) require_same_dim(d, l.dim());
    const EtaKernel& K = eta_kernel_table(d);
    const double reach = K.support() * w;
    // cell >= 2.5 reach keeps every point within reach of a sample in the 3^d neighbourhood
    PointGrid grid(P, 2.5 * reach, d);
    const double c = grid.cell;

    std::vector<double> per_line(L.size(), 0);
    std::vector<std::vector<std::uint32_t>> stamps(thread_count());
    parallel_for(L.size(), [&](std::size_t b, std::size_t e, unsigned worker) {
        auto& stamp = stamps[worker];
        stamp.assign(grid.cells(), 0);
        std::uint32_t tick = 0;
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t li = b; li < e; ++li) {
            const Line& l = L[li];
            // clip to the grid box grown by the kernel reach
            double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
            bool miss = false;
            for (int k = 0; k < d && !miss; ++k) {
                double p = l.base().v[k], q = l.dir()[k];
                double a = grid.lo[k] - reach, z = grid.hi[k] + reach;
                if (std::abs(q) < 1e-15) {
                    miss = p < a || p > z;
                    continue;
                }
                double ta = (a - p) / q, tb = (z - p) / q;
                if (ta > tb) std::swap(ta, tb);
                t0 = std::max(t0, ta), t1 = std::min(t1, tb);
            }
            if (miss || t1 < t0) continue;
            ++tick;
            terms.clear();
            const long steps = static_cast<long>(std::ceil((t1 - t0) / (c / 2)));
            for (long s = 0; s <= steps; ++s) {
                Vec3 x = l.at(std::min(t1, t0 + s * (c / 2)));
                long ci[3] = {grid.coord(x.x, 0), grid.coord(x.y, 1), d == 3 ? grid.coord(x.z, 2) : 0};
                for (long dx = -1; dx <= 1; ++dx)
                    for (long dy = -1; dy <= 1; ++dy)
                        for (long dz = (d == 3 ? -1 : 0); dz <= (d == 3 ? 1 : 0); ++dz) {
                            long a = ci[0] + dx, bb = ci[1] + dy, cc = ci[2] + dz;
                            if (a < 0 || bb < 0 || cc < 0 || a >= grid.n[0] || bb >= grid.n[1] || cc >= grid.n[2]) continue;
                            auto f = static_cast<std::size_t>((a * grid.n[1] + bb) * grid.n[2] + cc);
                            if (stamp[f] == tick) continue;
                            stamp[f] = tick;
                            for (std::size_t k = grid.start[f]; k < grid.start[f + 1]; ++k) {
                                std::size_t pi = grid.items[k];
                                double dd = point_line_distance(P[pi], l);
                                if (dd < reach) terms.push_back({pi, K.phi1(dd / w)});
                            }
                        }
            }
            std::sort(terms.begin(), terms.end());
            double sum = 0;
            for (auto& t : terms) sum += t.second;
            per_line[li] = sum;
        }
    });
    return pairwise_sum(per_line.data(), per_line.size());
}

double normalized_b(double w, const std::vector<Point>& P, const std::vector<Line>& L) {
    if (P.empty() || L.empty()) throw EmptyConfiguration("B needs nonempty point and line sets");
    const int d = P[0].dim;
    return incidence_count(w, P, L) / (std::pow(w, d - 1) * static_cast<double>(P.size()) * static_cast<double>(L.size()));
}

// ---------------------------------------------------------------------------
// right-hand sides

static int family_dim(const std::vector<Point>& P, const std::vector<Line>& L) {
    if (P.empty() || L.empty()) throw EmptyConfiguration("empty point or line family");
    require_same_dim(P[0].dim, L[0].dim());
    return P[0].dim;
}

double rhs_basic(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double eps) {
    const int d = family_dim(P, L);
    const double mp = static_cast<double>(m_points(P, delta)) / static_cast<double>(P.size());
    if (d == 2) return std::pow(delta, -3) * mp * static_cast<double>(m_lines(L, delta, 1.0)) / static_cast<double>(L.size());
    return std::pow(delta, -6 - eps) * mp * static_cast<double>(m_lines(L, delta, delta)) / static_cast<double>(L.size());
}

RefinedRhs rhs_refined(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double eps) {
    if (family_dim(P, L) != 3) throw DimensionMismatch("refined bound is three-dimensional");
    std::vector<Vec3> dirs;
    for (auto& l : L) dirs.push_back(l.dir());
    const double cap = std::sqrt(static_cast<double>(covering_number_directions(dirs, delta))) * delta;
    LineIndex idx(L);
    RefinedRhs out;
    double best = -1;
    for (double u = 1; u >= delta * (1 - 1e-12); u /= 2) {
        double v = std::min(cap, u) * u * static_cast<double>(idx.max_box(delta, delta / u).count);
        if (v > best) best = v, out.u = u;
    }
    const double mp = static_cast<double>(m_points(P, delta)) / static_cast<double>(P.size());
    out.value = std::pow(delta, -6 - eps) * mp * best / static_cast<double>(L.size());
    return out;
}

double rhs_direction_limited(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double nu,
                             double kappa, double M, double eps) {
    if (family_dim(P, L) != 3) throw DimensionMismatch("direction-limited bound is three-dimensional");
    std::vector<Vec3> dirs;
    for (auto& l : L) dirs.push_back(l.dir());
    const double theta = static_cast<double>(covering_number_directions(dirs, delta));
    if (theta > nu * std::pow(delta, -2))
        throw HypothesisViolation("direction covering " + std::to_string(theta) + " exceeds nu delta^-2");
    LineIndex idx(L);
    std::ostringstream bad;
    for (double u = 1; u >= delta * (1 - 1e-12); u /= 2) {
        double m = static_cast<double>(idx.max_box(delta, delta / u).count);
        if (m > std::pow(u, -2 + kappa) * M) bad << " u=" << u << " (M_L=" << m << ")";
    }
    if (!bad.str().empty()) throw HypothesisViolation("box concentration hypothesis fails at" + bad.str());
    const double mp = static_cast<double>(m_points(P, delta)) / static_cast<double>(P.size());
    return std::pow(nu, kappa / 4) * std::pow(delta, -6 - eps) * mp * M / static_cast<double>(L.size());
}

double uniformity_constant(const std::vector<Line>& L, double delta) {
    if (L.empty()) throw EmptyConfiguration("no lines");
    const int d = L[0].dim();
    const Vec3 c = d == 3 ? Vec3{0.5, 0.5, 0.5} : Vec3{0.5, 0.5, 0};
    const double rho = std::sqrt(static_cast<double>(d)) / 2;
    // trace of each line in the ball: segment endpoints (empty if it misses)
    struct Seg {
        bool empty;
        Point a, b;
    };
    std::vector<Seg> seg;
    for (auto& l : L) {
        Vec3 q = l.project(c);
        double r2 = rho * rho - norm2(q - c);
        if (r2 < 0) {
            seg.push_back({true, {}, {}});
            continue;
        }
        double h = std::sqrt(r2);
        seg.push_back({false, Point{q - h * l.dir(), d}, Point{q + h * l.dir(), d}});
    }
    std::size_t worst = SIZE_MAX;
    for (std::size_t i = 0; i < L.size(); ++i) {
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < L.size(); ++j)
            cnt += seg[j].empty || (point_line_distance(seg[j].a, L[i]) <= delta && point_line_distance(seg[j].b, L[i]) <= delta);
        worst = std::min(worst, cnt);
    }
    const double ml = static_cast<double>(d == 3 ? m_lines(L, delta, delta) : m_lines(L, delta, 1.0));
    return ml / static_cast<double>(worst);
}

WellSpacedRhs rhs_wellspaced(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double t1,
                             double t2, double K, double A, double C0, double eps) {
    if (family_dim(P, L) != 3) throw DimensionMismatch("well-spaced bound is three-dimensional");
    WellSpacedRhs out;
    out.alpha = wellspaced_alpha(t1, t2);
    out.measured_A = static_cast<double>(m_points(P, delta)) / (std::pow(delta, 3) * static_cast<double>(P.size()));
    out.measured_C0 = uniformity_constant(L, delta);
    out.measured_K = katz_tao_constant(L, delta, t1, t2);
    std::ostringstream bad;
    if (out.measured_A > A) bad << " point concentration A=" << out.measured_A << " > " << A << ";";
    if (out.measured_C0 > C0) bad << " uniformity C0=" << out.measured_C0 << " > " << C0 << ";";
    if (out.measured_K > K) bad << " Katz-Tao K=" << out.measured_K << " > " << K << ";";
    if (!bad.str().empty()) throw HypothesisViolation("well-spaced hypotheses fail:" + bad.str());
    LineIndex idx(L);
    const double sq = std::sqrt(delta);
    const double thick = static_cast<double>(idx.max_box(sq, sq).count);
    const double thin = static_cast<double>(idx.max_box(delta, delta).count);
    out.value = C0 * std::pow(delta, -eps - 2.5) * std::pow(K, out.alpha) * std::pow(A, 3.5) *
                std::pow(thick, 1 - out.alpha) * std::pow(thin, out.alpha) / static_cast<double>(L.size());
    out.lhs = std::pow(std::abs(normalized_b(delta / 2, P, L) - normalized_b(delta, P, L)), 4.5);
    return out;
}

MultiscaleReport dyadic_scan(const std::vector<Point>& P, const std::vector<Line>& L, double w_min, double w_max,
                             double eps) {
    if (!(w_min > 0) || !(w_min < w_max) || w_max > 1) throw InvalidInput("scan needs 0 < w_min < w_max <= 1");
    MultiscaleReport rep;
    rep.dim = family_dim(P, L);
    LineIndex idx(L);
    for (double w = w_max; w >= w_min * (1 - 1e-12); w /= 2) {
        ScanRow r;
        r.w = w;
        r.B = normalized_b(w, P, L);
        r.diff = rep.rows.empty() ? 0 : std::abs(rep.rows.back().B - r.B);
        r.mp = m_points(P, w);
        r.ml = rep.dim == 3 ? idx.max_box(w, w).count : idx.max_box(w, 1.0).count;
        r.rhs_basic = rep.dim == 3 ? std::pow(w, -6 - eps) * static_cast<double>(r.mp) / static_cast<double>(P.size()) *
                                         static_cast<double>(r.ml) / static_cast<double>(L.size())
                                   : std::pow(w, -3) * static_cast<double>(r.mp) / static_cast<double>(P.size()) *
                                         static_cast<double>(r.ml) / static_cast<double>(L.size());
        if (rep.dim == 3) r.rhs_refined = rhs_refined(w, P, L, eps).value;
        r.ratio = r.rhs_basic > 0 ? r.diff * r.diff / r.rhs_basic : 0;
        rep.rows.push_back(r);
    }
    return rep;
}

// ---------------------------------------------------------------------------

ScaleCheck initial_estimate_check(const Configuration& X, double w, std::size_t anchor) {
    ScaleCheck s;
    s.w = w;
    auto Xw = rescale_config(X, w, anchor);
    s.cover_theta = covering_number_directions(Xw.directions(), w);
    s.cover_lines = covering_number(X.lines(), w);
    s.cover_points = covering_number(X.points(), w);
    s.lhs = normalized_b(w, X.points(), X.lines());
    s.rhs = static_cast<double>(s.cover_theta) / (std::pow(w, X.dim - 1) * static_cast<double>(s.cover_lines));
    s.slack = s.lhs > 0 ? s.rhs / s.lhs : std::numeric_limits<double>::infinity();
    return s;
}

ScaleCheck double_count_check(const Configuration& X, double w, std::size_t anchor) {
    ScaleCheck s;
    s.w = w;
    auto Xw = rescale_config(X, w, anchor);
    s.cover_theta = covering_number_directions(Xw.directions(), w);
    s.cover_lines = covering_number(X.lines(), w);
    s.cover_points = covering_number(X.points(), w);
    s.lhs = static_cast<double>(s.cover_lines);
    s.rhs = w * static_cast<double>(s.cover_theta) * static_cast<double>(s.cover_points);
    s.slack = s.rhs / s.lhs;
    return s;
}

}  // namespace heilbronn
