#include "heilbronn/geom.hpp"

#include <algorithm>
#include <limits>

namespace heilbronn {

Vec3 normalized(Vec3 a) {
    double n = norm(a);
    if (!(n > 0) || !std::isfinite(n)) throw InvalidInput("cannot normalize zero or non-finite vector");
    // already unit: keep the bits, so written directions read back exactly
    if (std::abs(n - 1) <= 4 * std::numeric_limits<double>::epsilon()) return a;
    return (1.0 / n) * a;
}

Vec3 any_orthogonal(Vec3 a) {
    // cross with the coordinate axis least aligned with a
    Vec3 e{1, 0, 0};
    double ax = std::abs(a.x), ay = std::abs(a.y), az = std::abs(a.z);
    if (ay <= ax && ay <= az) e = {0, 1, 0};
    else if (az <= ax && az <= ay) e = {0, 0, 1};
    return normalized(cross(a, e));
}

Vec3 canonical_direction(Vec3 d) {
    for (int i = 0; i < 3; ++i) {
        if (d[i] > 0) return d;
        if (d[i] < 0) return -d;
    }
    return d;
}

Line::Line(Point base, Vec3 dir) : base_(base) {
    if (!std::isfinite(base.v.x) || !std::isfinite(base.v.y) || !std::isfinite(base.v.z))
        throw InvalidInput("line base is not finite");
    if (base.dim == 2 && (dir.z != 0 || base.v.z != 0)) throw DimensionMismatch("2D line with out-of-plane component");
    dir_ = canonical_direction(normalized(dir));
}

Line Line::through(Point a, Point b) {
    require_same_dim(a.dim, b.dim);
    return Line(a, b.v - a.v);
}

Box Box::make(Vec3 center, Vec3 long_axis, Vec3 thin_axis, double u, double w, double len) {
    if (!(u > 0) || !(w > 0) || !(len > 0)) throw InvalidInput("degenerate box");
    if (u > w || w > len) throw InvalidInput("box extents must satisfy u <= w <= len");
    Box b;
    b.center = center;
    Vec3 e2 = normalized(long_axis);
    Vec3 e0 = thin_axis - dot(thin_axis, e2) * e2;
    e0 = norm(e0) > 1e-12 ? normalized(e0) : any_orthogonal(e2);
    b.frame = {e0, cross(e2, e0), e2};
    b.half = {u / 2, w / 2, len / 2};
    return b;
}

bool Box::contains(Vec3 q, double tol) const {
    Vec3 d = q - center;
    for (int k = 0; k < 3; ++k)
        if (std::abs(dot(d, frame[k])) > half[k] + tol) return false;
    return true;
}

Box Box::dilated(double s) const {
    Box b = *this;
    for (auto& h : b.half) h *= s;
    return b;
}

bool SphericalRectangle::contains(Vec3 x) const {
    // arc: cos(s) c + sin(s) a, s in [-L, L]
    Vec3 n = cross(center, axis);  // pole of the great circle
    double off = std::asin(std::clamp(dot(x, n), -1.0, 1.0));
    if (std::abs(off) > width / 2) return false;
    Vec3 inplane = x - dot(x, n) * n;
    double s = std::atan2(dot(inplane, axis), dot(inplane, center));
    if (std::abs(s) <= half_length) return true;
    // beyond the arc ends: distance to the nearer endpoint
    double se = s > 0 ? half_length : -half_length;
    Vec3 end = std::cos(se) * center + std::sin(se) * axis;
    return std::acos(std::clamp(dot(x, end), -1.0, 1.0)) <= width / 2;
}

void require_same_dim(int a, int b) {
    if (a != b) throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

double point_line_distance(const Point& p, const Line& l) {
    require_same_dim(p.dim, l.dim());
    Vec3 d = p.v - l.base().v;
    Vec3 perp = d - dot(d, l.dir()) * l.dir();
    return norm(perp);
}

double direction_distance(Vec3 a, Vec3 b) { return std::min(norm(a - b), norm(a + b)); }

double line_line_distance(const Line& a, const Line& b) {
    require_same_dim(a.dim(), b.dim());
    Vec3 n = cross(a.dir(), b.dir());
    double nn = norm(n);
    Vec3 d = b.base().v - a.base().v;
    if (nn < 1e-12) {
        Vec3 perp = d - dot(d, a.dir()) * a.dir();
        return norm(perp);
    }
    return std::abs(dot(d, n)) / nn;
}

double line_metric(const Line& a, const Line& b) {
    return direction_distance(a.dir(), b.dir()) + line_line_distance(a, b);
}

double line_box_chord(const Line& l, const Box& b) {
    for (double h : b.half)
        if (!(h > 0)) throw InvalidInput("degenerate box");
    double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
    Vec3 o = l.base().v - b.center;
    for (int k = 0; k < 3; ++k) {
        double p = dot(o, b.frame[k]);
        double q = dot(l.dir(), b.frame[k]);
        double h = b.half[k];
        if (std::abs(q) < 1e-15) {
            if (std::abs(p) > h) return 0.0;
            continue;
        }
        double ta = (-h - p) / q, tb = (h - p) / q;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return 0.0;
    }
    return t1 - t0;
}

std::size_t covering_number(std::size_t n, double w, const std::function<double(std::size_t, std::size_t)>& metric,
                            std::vector<std::size_t>* picked) {
    if (!(w > 0)) throw InvalidInput("covering scale must be positive");
    if (picked) picked->clear();
    if (n == 0) return 0;
    // farthest-point sampling; stops once every item is within w of the net
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    std::size_t cur = 0, count = 0;
    while (true) {
        ++count;
        if (picked) picked->push_back(cur);
        std::size_t far = 0;
        double best = -1;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = std::min(d[i], metric(cur, i));
            if (d[i] > best) best = d[i], far = i;
        }
        if (best <= w) break;
        cur = far;
    }
    return count;
}

std::size_t covering_number(const std::vector<Point>& pts, double w) {
    return covering_number(pts.size(), w, [&](std::size_t i, std::size_t j) { return dist(pts[i].v, pts[j].v); });
}

std::size_t covering_number(const std::vector<Line>& lines, double w) {
    return covering_number(lines.size(), w, [&](std::size_t i, std::size_t j) { return line_metric(lines[i], lines[j]); });
}

std::size_t covering_number_directions(const std::vector<Vec3>& dirs, double w) {
    return covering_number(dirs.size(), w,
                           [&](std::size_t i, std::size_t j) { return direction_distance(dirs[i], dirs[j]); });
}

}  // namespace heilbronn
