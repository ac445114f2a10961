#include "heilbronn/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "heilbronn/multiscale.hpp"

namespace heilbronn {

Tube Tube::make(int dim, Vec3 center, Vec3 dir, double width, double length) {
    if (dim != 2 && dim != 3) throw DimensionMismatch("tubes live in 2D or 3D");
    if (!(width > 0) || !(length > 0)) throw InvalidInput("tube sides must be positive");
    if (width > length) throw InvalidInput("tube width exceeds its length");
    if (dim == 2 && (center.z != 0 || dir.z != 0)) throw DimensionMismatch("planar tube with z component");
    return {dim, center, normalized(dir), width, length};
}

double Tube::lateral(Vec3 p) const {
    Vec3 q = p - center;
    return norm(q - dot(q, dir) * dir);
}

bool Tube::contains(Vec3 p, double s) const {
    return std::abs(axial(p)) <= s * length / 2 && lateral(p) <= s * width / 2;
}

Line Tube::axis() const { return Line(Point{center, dim}, dir); }

double Tube::volume() const { return dim == 2 ? width * length : M_PI * width * width / 4 * length; }

std::vector<Line> tube_axes(const std::vector<Tube>& T) {
    std::vector<Line> out;
    out.reserve(T.size());
    for (auto& t : T) out.push_back(t.axis());
    return out;
}

Shading Shading::full(const std::vector<Tube>& T) {
    Shading Y;
    for (auto& t : T) Y.parts.push_back({{0, t.length}});
    return Y;
}

double Shading::density(std::size_t i, const Tube& t) const {
    double s = 0;
    for (auto& iv : parts.at(i)) s += iv.b - iv.a;
    return s / t.length;
}

double Shading::min_density(const std::vector<Tube>& T) const {
    double m = 1;
    for (std::size_t i = 0; i < T.size(); ++i) m = std::min(m, density(i, T[i]));
    return m;
}

void validate_shading(const std::vector<Tube>& T, const Shading& Y) {
    if (Y.parts.size() != T.size()) throw InvalidInput("shading size differs from tube count");
    for (std::size_t i = 0; i < T.size(); ++i) {
        double prev = 0;
        for (auto& iv : Y.parts[i]) {
            if (iv.a < prev - 1e-12 || iv.b < iv.a || iv.b > T[i].length + 1e-12)
                throw InvalidInput("shading intervals must be sorted, disjoint and inside the tube (tube " +
                                   std::to_string(i) + ")");
            prev = iv.b;
        }
    }
}

Shading random_shading(const std::vector<Tube>& T, double lambda, int pieces, std::uint64_t seed) {
    if (!(lambda > 0) || lambda > 1 || pieces < 1) throw InvalidInput("bad shading parameters");
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    Shading Y;
    for (auto& t : T) {
        // split the free length (1-lambda) len into pieces+1 random gaps
        std::vector<double> g(pieces + 1);
        double tot = 0;
        for (auto& x : g) tot += (x = U(rng) + 1e-9);
        double freel = (1 - lambda) * t.length, piece = lambda * t.length / pieces, pos = 0;
        std::vector<Interval> parts;
        for (int k = 0; k < pieces; ++k) {
            pos += g[k] / tot * freel;
            parts.push_back({pos, pos + piece});
            pos += piece;
        }
        Y.parts.push_back(parts);
    }
    return Y;
}

std::vector<Vec3> rich_points(const std::vector<Vec3>& net, const std::vector<Tube>& regions, std::size_t r) {
    if (r < 1) throw InvalidInput("richness must be at least 1");
    std::vector<std::size_t> order(net.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return net[a].x < net[b].x; });
    std::vector<double> xs;
    for (auto i : order) xs.push_back(net[i].x);
    std::vector<std::size_t> cnt(net.size(), 0);
    for (auto& t : regions) {
        // x-extent of the region
        double ex = std::abs(t.dir.x) * t.length / 2 + std::sqrt(std::max(0.0, 1 - t.dir.x * t.dir.x)) * t.width / 2;
        auto lo = std::lower_bound(xs.begin(), xs.end(), t.center.x - ex - 1e-12);
        auto hi = std::upper_bound(xs.begin(), xs.end(), t.center.x + ex + 1e-12);
        for (auto it = lo; it != hi; ++it) {
            std::size_t i = order[it - xs.begin()];
            cnt[i] += t.contains(net[i]);
        }
    }
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (cnt[i] >= r) out.push_back(net[i]);
    return out;
}

// ---------------------------------------------------------------------------
// two ends

namespace {

// y-range where |alpha + beta y| <= H
bool slab_interval(double alpha, double beta, double H, double& lo, double& hi) {
    if (std::abs(beta) < 1e-15) {
        if (std::abs(alpha) > H) return false;
        lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        return true;
    }
    lo = (-H - alpha) / beta, hi = (H - alpha) / beta;
    if (lo > hi) std::swap(lo, hi);
    return true;
}

// Lattice {-2 + i h} x {-2 + j h}, visited in column strips.
struct NetLattice {
    double h;
    long ia, ib, ja, jb;

    double x(long i) const { return -2 + static_cast<double>(i) * h; }

    // net points of the rectangle (centre c, unit dir d, half sides HL along d, HW across)
    template <class Fn>
    void visit(Vec3 c, Vec3 d, double HL, double HW, long ca, long cb, Fn&& fn) const {
        Vec3 n{-d.y, d.x, 0};
        double ex = std::abs(d.x) * HL + std::abs(n.x) * HW;
        long i0 = std::max({ca, ia, static_cast<long>(std::ceil((c.x - ex + 2) / h))});
        long i1 = std::min({cb, ib, static_cast<long>(std::floor((c.x + ex + 2) / h))});
        for (long i = i0; i <= i1; ++i) {
            double xx = x(i), l1, h1, l2, h2;
            if (!slab_interval((xx - c.x) * d.x - c.y * d.y, d.y, HL, l1, h1)) continue;
            if (!slab_interval((xx - c.x) * n.x - c.y * n.y, n.y, HW, l2, h2)) continue;
            double lo = std::max(l1, l2), hi = std::min(h1, h2);
            if (lo > hi) continue;
            long j0 = std::max(ja, static_cast<long>(std::ceil((std::max(lo, -3.0) + 2) / h)));
            long j1 = std::min(jb, static_cast<long>(std::floor((std::min(hi, 3.0) + 2) / h)));
            for (long j = j0; j <= j1; ++j) fn(i, j, Vec3{xx, x(j), 0});
        }
    }
};

}  // namespace

TwoEndsResult two_ends_decompose(const std::vector<Tube>& T, double delta, double Delta, const TwoEndsOptions& opt) {
    if (!(delta > 0) || !(Delta > delta) || !(Delta < 1)) throw InvalidInput("two ends needs 0 < delta < Delta < 1");
    if (T.size() > 65535) throw InvalidInput("two ends supports at most 65535 tubes");
    for (auto& t : T) {
        if (t.dim != 2) throw DimensionMismatch("two ends works on planar tubes");
        if (std::abs(t.width - delta) > 1e-9 * delta) throw InvalidInput("tube width differs from delta");
        for (double s : {-0.5, 0.5}) {
            Vec3 e = t.center + s * t.length * t.dir;
            if (std::abs(e.x) > 2 + 1e-12 || std::abs(e.y) > 2 + 1e-12) throw InvalidInput("tubes must lie in [-2,2]^2");
        }
    }
    TwoEndsResult res;
    const std::size_t n = T.size();
    res.delta = delta, res.Delta = Delta, res.C1 = opt.C1;
    const double logb = std::log(1 / delta) / std::log(2 / Delta);
    res.m = opt.rounds > 0 ? opt.rounds : static_cast<int>(std::ceil(3 * logb));
    res.r = opt.C1 * std::pow(Delta, -2) * std::sqrt(static_cast<double>(n));
    res.U_of_T.assign(n, {});
    res.excised.assign(n, {});
    if (n == 0) return res;

    // net over the bounding box of the doubled tubes
    NetLattice net{delta / 10, 0, 0, 0, 0};
    double xlo = 2, xhi = -2, ylo = 2, yhi = -2;
    for (auto& t : T) {
        Vec3 nn{-t.dir.y, t.dir.x, 0};
        for (double a : {-1.0, 1.0})
            for (double b : {-1.0, 1.0}) {
                Vec3 p = t.center + (a * t.length) * t.dir + (b * delta) * nn;
                xlo = std::min(xlo, p.x), xhi = std::max(xhi, p.x), ylo = std::min(ylo, p.y), yhi = std::max(yhi, p.y);
            }
    }
    const long N = static_cast<long>(std::floor(4 / net.h));
    net.ia = std::clamp(static_cast<long>(std::floor((xlo + 2) / net.h)), 0L, N);
    net.ib = std::clamp(static_cast<long>(std::ceil((xhi + 2) / net.h)), 0L, N);
    net.ja = std::clamp(static_cast<long>(std::floor((ylo + 2) / net.h)), 0L, N);
    net.jb = std::clamp(static_cast<long>(std::ceil((yhi + 2) / net.h)), 0L, N);
    const long rows = net.jb - net.ja + 1;
    const long strip = std::max(1L, static_cast<long>(opt.strip_cells) / rows);
    std::vector<std::uint16_t> cnt(static_cast<std::size_t>(strip * rows));

    // One sweep over the net: counts multiplicities of the residual sets, then
    // hands every residual point with its count to `use` (skipped when the
    // strip maximum is below `need`). Returns the global maximum.
    auto sweep = [&](auto&& excluded, std::size_t need, auto&& use) {
        std::size_t best = 0;
        for (long c0 = net.ia; c0 <= net.ib; c0 += strip) {
            const long c1 = std::min(net.ib, c0 + strip - 1);
            std::fill(cnt.begin(), cnt.end(), 0);
            for (std::size_t k = 0; k < n; ++k) {
                const Tube& t = T[k];
                net.visit(t.center, t.dir, t.length, delta, c0, c1, [&](long i, long j, Vec3 p) {
                    if (excluded(k, p)) return;
                    auto& c = cnt[static_cast<std::size_t>((i - c0) * rows + (j - net.ja))];
                    if (c < 65535) ++c;
                });
            }
            std::size_t mx = *std::max_element(cnt.begin(), cnt.end());
            best = std::max(best, mx);
            if (mx < need) continue;
            for (std::size_t k = 0; k < n; ++k) {
                const Tube& t = T[k];
                net.visit(t.center, t.dir, t.length, delta, c0, c1, [&](long i, long j, Vec3 p) {
                    if (excluded(k, p)) return;
                    use(k, p, cnt[static_cast<std::size_t>((i - c0) * rows + (j - net.ja))]);
                });
            }
        }
        return best;
    };

    const std::size_t r = static_cast<std::size_t>(std::ceil(res.r));
    std::vector<std::vector<double>> cut(n);  // axial centres of U_i(T)
    const double quarter = Delta / 4;         // half length of U_i(T), in units of the tube length
    auto excised_round = [&](std::size_t k, Vec3 p) {
        double s = T[k].axial(p);
        for (double c : cut[k])
            if (std::abs(s - c) <= quarter * T[k].length) return true;
        return false;
    };
    for (int round = 0; round < res.m; ++round) {
        std::vector<std::vector<double>> rich(n);
        std::size_t mx = sweep(excised_round, r, [&](std::size_t k, Vec3 p, std::size_t c) {
            if (c >= r) rich[k].push_back(T[k].axial(p));
        });
        if (mx < r) break;
        ++res.rounds_run;
        for (std::size_t k = 0; k < n; ++k) {
            auto& s = rich[k];
            if (s.empty()) continue;
            std::sort(s.begin(), s.end());
            const double L = T[k].length, win = Delta * L / 8;
            // candidate centres on a delta-step along the doubled axis
            const long steps = static_cast<long>(std::floor(2 * L / delta));
            std::size_t best = 0, lo = 0, hi = 0;
            double arg = 0;
            for (long q = 0; q <= steps; ++q) {
                double sc = -L + static_cast<double>(q) * delta;
                while (lo < s.size() && s[lo] < sc - win) ++lo;
                if (hi < lo) hi = lo;
                while (hi < s.size() && s[hi] <= sc + win) ++hi;
                if (hi - lo > best) best = hi - lo, arg = sc;
            }
            if (best == 0) continue;
            cut[k].push_back(arg);
            res.excised[k].push_back(Tube::make(2, T[k].center + arg * T[k].dir, T[k].dir, 4 * delta, Delta * L / 2));
        }
    }

    // cover the excised pieces by essentially distinct Delta x 8 delta tubes
    auto inside = [](const Tube& small, const Tube& big, double s) {
        Vec3 nn{-small.dir.y, small.dir.x, 0};
        for (double a : {-0.5, 0.5})
            for (double b : {-0.5, 0.5})
                if (!big.contains(small.center + (a * small.length) * small.dir + (b * small.width) * nn, s)) return false;
        return true;
    };
    // T must cross both short sides of U, within its half width
    auto coaxial = [&](const Tube& t, const Tube& U) {
        Vec3 nu{-U.dir.y, U.dir.x, 0};
        double cosang = dot(t.dir, U.dir);
        if (std::abs(cosang) < 1e-12) return false;
        for (double a : {-U.length / 2, U.length / 2}) {
            double s = (a - dot(t.center - U.center, U.dir)) / cosang;
            if (std::abs(dot(t.center + s * t.dir - U.center, nu)) > U.width / 2 + 1e-12) return false;
        }
        return true;
    };
    for (std::size_t k = 0; k < n; ++k) {
        for (auto& piece : res.excised[k]) {
            std::size_t pick = SIZE_MAX;
            for (std::size_t u = 0; u < res.U.size() && pick == SIZE_MAX; ++u)
                if (inside(piece, res.U[u], 0.9) && coaxial(T[k], res.U[u])) pick = u;
            for (std::size_t u = 0; u < res.U.size() && pick == SIZE_MAX; ++u) {
                const Tube& U = res.U[u];
                double ang = std::acos(std::min(1.0, std::abs(dot(U.dir, piece.dir))));
                if (dist(U.center, piece.center) < 4 * delta && ang < 4 * delta / U.length && coaxial(T[k], U) &&
                    inside(piece, U, 1.0))
                    pick = u;
            }
            if (pick == SIZE_MAX) {
                res.U.push_back(Tube::make(2, piece.center, piece.dir, 8 * delta, Delta * T[k].length));
                pick = res.U.size() - 1;
            }
            auto& lst = res.U_of_T[k];
            if (std::find(lst.begin(), lst.end(), pick) == lst.end()) lst.push_back(pick);
        }
        res.max_U_per_T = std::max(res.max_U_per_T, res.U_of_T[k].size());
        for (auto u : res.U_of_T[k]) res.coaxial_violations += !coaxial(T[k], res.U[u]);
    }

    auto excised_final = [&](std::size_t k, Vec3 p) {
        for (auto u : res.U_of_T[k])
            if (res.U[u].contains(p)) return true;
        return false;
    };
    res.overlap = sweep(excised_final, SIZE_MAX, [](std::size_t, Vec3, std::size_t) {});
    res.overlap_constant = static_cast<double>(res.overlap) / (std::pow(Delta, -2) * std::sqrt(static_cast<double>(n)));
    res.U_constant = static_cast<double>(res.max_U_per_T) / logb;
    return res;
}

// ---------------------------------------------------------------------------
// sphere

GnomonicChart::GnomonicChart(Vec3 c_) : c(normalized(c_)) {
    e1 = normalized(any_orthogonal(c));
    e2 = cross(c, e1);
}

Vec3 GnomonicChart::project(Vec3 x) const {
    double s = dot(x, c);
    if (!(s > 0)) throw InvalidInput("point outside the chart hemisphere");
    Vec3 q = (1 / s) * x - c;
    return {dot(q, e1), dot(q, e2), 0};
}

Vec3 GnomonicChart::lift(Vec3 q) const { return normalized(c + q.x * e1 + q.y * e2); }

SphericalTwoEndsResult spherical_two_ends(const std::vector<SphericalRectangle>& T, double delta, double Delta,
                                          double b, const TwoEndsOptions& opt) {
    const double c = kSphereConstant, rball = kSphereConstant, eps = 0.1;
    if (!(Delta < c)) throw InvalidInput("spherical two ends needs Delta < 0.1");
    if (!(delta > 0) || delta > c * Delta * b) throw InvalidInput("spherical two ends needs delta <= 0.1 Delta b");
    SphericalTwoEndsResult out;
    out.U_of_T.assign(T.size(), {});

    struct Piece {
        std::size_t orig;
        Vec3 center, axis;
        double half;
    };
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k < T.size(); ++k) {
        const auto& R = T[k];
        if (std::abs(R.width - delta) > 1e-9 * delta) throw InvalidInput("rectangle width differs from delta");
        if (std::abs(2 * R.half_length - b) > 1e-9 * b) throw InvalidInput("rectangle length differs from b");
        Vec3 cc = normalized(R.center);
        Vec3 ax = normalized(R.axis - dot(R.axis, cc) * cc);
        const double L = 2 * R.half_length;
        const int np = std::max(1, static_cast<int>(std::ceil(L / (rball / 4) - 1e-12)));
        const double hl = R.half_length / np;
        for (int j = 0; j < np; ++j) {
            double s = -R.half_length + (2 * j + 1) * hl;
            pieces.push_back({k, std::cos(s) * cc + std::sin(s) * ax, -std::sin(s) * cc + std::cos(s) * ax, hl});
        }
    }
    out.pieces = pieces.size();

    // ball centres: a Fibonacci sphere with spacing well under the ball radius
    const int NB = static_cast<int>(std::ceil(4 * M_PI / std::pow(0.4 * rball, 2)));
    std::vector<Vec3> centres;
    const double ga = M_PI * (3 - std::sqrt(5.0));
    for (int i = 0; i < NB; ++i) {
        double z = 1 - (2 * i + 1.0) / NB, rr = std::sqrt(1 - z * z);
        centres.push_back({rr * std::cos(ga * i), rr * std::sin(ga * i), z});
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        std::size_t best = 0;
        double bd = -2;
        for (std::size_t i = 0; i < centres.size(); ++i) {
            double d = dot(centres[i], pieces[p].center);
            if (d > bd) bd = d, best = i;
        }
        double ang = std::acos(std::clamp(bd, -1.0, 1.0));
        if (ang + pieces[p].half + delta > rball) throw NumericalFailure("piece does not fit its ball");
        groups[best].push_back(p);
    }
    out.balls_used = groups.size();

    const double sigma = 1.9 / std::tan(rball);
    for (auto& [bi, members] : groups) {
        GnomonicChart chart(centres[bi]);
        std::vector<Tube> planar;
        for (auto p : members) {
            const Piece& pc = pieces[p];
            Vec3 a = sigma * chart.project(std::cos(pc.half) * pc.center - std::sin(pc.half) * pc.axis);
            Vec3 z = sigma * chart.project(std::cos(pc.half) * pc.center + std::sin(pc.half) * pc.axis);
            double len = (1 - eps) * dist(a, z);
            planar.push_back(Tube::make(2, 0.5 * (a + z), z - a, (1 - eps) * sigma * delta, len));
        }
        TwoEndsResult r = two_ends_decompose(planar, (1 - eps) * sigma * delta, Delta, opt);
        const std::size_t base = out.U.size();
        for (std::size_t u = 0; u < r.U.size(); ++u) {
            const Tube& U = r.U[u];
            Vec3 x = chart.lift((1 / sigma) * U.center);
            Vec3 y = chart.lift((1 / sigma) * (U.center + 1e-3 * U.dir));
            Vec3 ax = normalized(y - dot(y, x) * x);
            // owner piece length sets the arc length of the lifted rectangle
            double hl = U.length / (1 - eps) / sigma / 2;
            out.U.push_back({x, ax, hl, 10 * delta});
        }
        for (std::size_t q = 0; q < members.size(); ++q) {
            auto& dst = out.U_of_T[pieces[members[q]].orig];
            for (auto u : r.U_of_T[q])
                if (std::find(dst.begin(), dst.end(), base + u) == dst.end()) dst.push_back(base + u);
        }
        out.overlap = std::max(out.overlap, r.overlap);
        out.overlap_constant = std::max(out.overlap_constant, r.overlap_constant);
        out.per_ball.push_back(std::move(r));
    }
    for (auto& l : out.U_of_T) out.max_U_per_T = std::max(out.max_U_per_T, l.size());
    return out;
}

// ---------------------------------------------------------------------------
// union volumes and brush bounds

double shading_union_volume(const std::vector<Tube>& T, const Shading& Y, double res) {
    if (T.empty()) return 0;
    validate_shading(T, Y);
    const int d = T[0].dim;
    double wmin = T[0].width;
    for (auto& t : T) {
        require_same_dim(d, t.dim);
        wmin = std::min(wmin, t.width);
    }
    if (!(res > 0) || res > wmin / 4 * (1 + 1e-12)) throw InvalidInput("resolution must be at most a quarter of the tube width");
    const long off = 1L << 20;
    auto cell = [&](double x) { return static_cast<long>(std::floor(x / res)); };
    auto centre = [&](long i) { return (static_cast<double>(i) + 0.5) * res; };
    std::vector<std::uint64_t> keys;
    auto pack = [&](long i, long j, long k) {
        return (static_cast<std::uint64_t>(i + off) << 42) | (static_cast<std::uint64_t>(j + off) << 21) |
               static_cast<std::uint64_t>(k + off);
    };
    for (std::size_t ti = 0; ti < T.size(); ++ti) {
        const Tube& t = T[ti];
        const double R = t.width / 2;
        for (auto& iv : Y.parts[ti]) {
            if (iv.b <= iv.a) continue;
            // axial window relative to the centre
            const double a0 = iv.a - t.length / 2, a1 = iv.b - t.length / 2;
            Vec3 p0 = t.center + a0 * t.dir, p1 = t.center + a1 * t.dir;
            long lo[3], hi[3];
            for (int k = 0; k < 3; ++k) {
                lo[k] = cell(std::min(p0[k], p1[k]) - R) - 1;
                hi[k] = cell(std::max(p0[k], p1[k]) + R) + 1;
            }
            const Vec3 dd = t.dir;
            for (long i = lo[0]; i <= hi[0]; ++i)
                for (long j = lo[1]; j <= (d == 2 ? hi[1] : hi[1]); ++j) {
                    if (d == 2) {
                        Vec3 p{centre(i), centre(j), 0};
                        double s = t.axial(p);
                        if (s >= a0 && s <= a1 && t.lateral(p) <= R) keys.push_back(pack(i, j, 0));
                        continue;
                    }
                    // vertical line through (x, y): axial slab and lateral quadratic in z
                    Vec3 q0{centre(i) - t.center.x, centre(j) - t.center.y, -t.center.z};
                    double zl, zh;
                    if (std::abs(dd.z) < 1e-15) {
                        double s = dot(q0, dd);
                        if (s < a0 || s > a1) continue;
                        zl = -std::numeric_limits<double>::infinity(), zh = std::numeric_limits<double>::infinity();
                    } else {
                        zl = (a0 - dot(q0, dd)) / dd.z, zh = (a1 - dot(q0, dd)) / dd.z;
                        if (zl > zh) std::swap(zl, zh);
                    }
                    double qd = dot(q0, dd);
                    double A = 1 - dd.z * dd.z, B = 2 * (q0.z - qd * dd.z), C = norm2(q0) - qd * qd - R * R;
                    if (A < 1e-15) {
                        if (C > 0) continue;
                    } else {
                        double disc = B * B - 4 * A * C;
                        if (disc < 0) continue;
                        double sq = std::sqrt(disc);
                        zl = std::max(zl, (-B - sq) / (2 * A)), zh = std::min(zh, (-B + sq) / (2 * A));
                    }
                    // shift back to absolute z (q0.z already includes -centre.z)
                    long k0 = std::max(lo[2], static_cast<long>(std::ceil(zl / res - 0.5)));
                    long k1 = std::min(hi[2], static_cast<long>(std::floor(zh / res - 0.5)));
                    for (long k = k0; k <= k1; ++k) keys.push_back(pack(i, j, k));
                }
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return static_cast<double>(keys.size()) * std::pow(res, d);
}

static double check_lambda(const std::vector<Tube>& T, const Shading& Y, double delta) {
    double lambda = Y.min_density(T);
    if (lambda < delta) throw InvalidInput("shading density below delta");
    return lambda;
}

BrushReport check_planar_brush(const std::vector<Tube>& T, const Shading& Y, double t, double K, double eps, double u) {
    if (T.empty()) throw EmptyConfiguration("no tubes");
    if (T[0].dim != 2) throw DimensionMismatch("planar brush needs planar tubes");
    const double delta = T[0].width;
    BrushReport rep;
    rep.lambda = check_lambda(T, Y, delta);
    rep.exponent = t;
    rep.measured_K = katz_tao_constant(tube_axes(T), delta, t, 0);
    if (rep.measured_K > K * (1 + 1e-12))
        throw HypothesisViolation("Katz-Tao constant " + std::to_string(rep.measured_K) + " exceeds " + std::to_string(K));
    rep.volume = shading_union_volume(T, Y, delta / 4);
    rep.bound = std::pow(delta, eps) / K * rep.lambda * rep.lambda * std::pow(delta, t) * std::pow(u, 1 - t) *
                static_cast<double>(T.size());
    rep.fitted_constant = rep.bound / rep.volume;
    rep.holds = rep.fitted_constant <= 1e3;
    return rep;
}

BrushReport check_space_brush(const std::vector<Tube>& T, const Shading& Y, double t1, double t2, double K,
                              double eps) {
    if (T.empty()) throw EmptyConfiguration("no tubes");
    if (T[0].dim != 3) throw DimensionMismatch("space brush needs 3D tubes");
    const double delta = T[0].width;
    BrushReport rep;
    rep.lambda = check_lambda(T, Y, delta);
    rep.exponent = hairbrush_exponent(t1, t2);
    rep.measured_K = katz_tao_constant(tube_axes(T), delta, t1, t2);
    if (rep.measured_K > K * (1 + 1e-12))
        throw HypothesisViolation("Katz-Tao constant " + std::to_string(rep.measured_K) + " exceeds " + std::to_string(K));
    rep.volume = shading_union_volume(T, Y, delta / 4);
    rep.bound = std::pow(delta, eps) * std::pow(K, -rep.exponent) * std::pow(rep.lambda, 2.5) * delta * delta *
                std::pow(static_cast<double>(T.size()), rep.exponent);
    rep.fitted_constant = rep.bound / rep.volume;
    rep.holds = rep.fitted_constant <= 1e3;
    return rep;
}

KatzTaoTubes generate_katz_tao_tubes(double delta, double t1, double t2, std::size_t count, std::uint64_t seed, int dim,
                                     double C) {
    if (t1 < 1 || (dim == 3 && t2 < 1)) throw InvalidInput("Katz-Tao exponents must be at least 1");
    if (!(delta > 0) || delta >= 1) throw InvalidInput("delta must lie in (0,1)");
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.25, 0.75);
    std::vector<double> scales;
    for (double s = 1; s >= delta * (1 - 1e-12); s /= 2) scales.push_back(s);
    KatzTaoTubes out;
    std::vector<Line> axes;
    while (out.tubes.size() < count && out.attempts < 100 * count) {
        ++out.attempts;
        Vec3 c{U(rng), U(rng), dim == 3 ? U(rng) : 0.0};
        Vec3 d = random_direction(rng, dim);
        Line l(Point{c, dim}, d);
        Vec3 e = l.dir();
        Vec3 a = dim == 3 ? any_orthogonal(e) : Vec3{-e.y, e.x, 0};
        Vec3 b = cross(e, a);
        bool ok = true;
        for (std::size_t iu = 0; iu < scales.size() && ok; ++iu)
            for (std::size_t iw = (dim == 3 ? 0 : iu); iw <= iu && ok; ++iw) {
                const double u = scales[iu], w = dim == 3 ? scales[iw] : 1.0;
                const double cap = C * std::pow(u / delta, t1) * (dim == 3 ? std::pow(w / delta, t2) : 1.0);
                if (static_cast<double>(axes.size() + 1) <= cap) continue;
                const int orients = dim == 3 && u < w ? 3 : 1;
                for (int o = 0; o < orients && ok; ++o) {
                    double th = M_PI * o / 3;
                    Vec3 thin = dim == 3 ? std::cos(th) * a + std::sin(th) * b : a;
                    Box box = Box::make(c, e, thin, u, w, 1.0);
                    std::size_t inside = 1;
                    for (auto& m : axes) inside += line_box_chord(m, box) >= 0.5 - 1e-12;
                    ok = static_cast<double>(inside) <= cap;
                }
            }
        if (!ok) continue;
        axes.push_back(l);
        out.tubes.push_back(Tube::make(dim, c, e, delta, 1.0));
    }
    out.complete = out.tubes.size() == count;
    return out;
}

}  // namespace heilbronn
