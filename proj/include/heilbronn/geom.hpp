#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heilbronn {

// Error kinds. The CLI maps these onto exit codes.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct EmptyConfiguration : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct HypothesisViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return s * a; }
inline bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double dist(Vec3 a, Vec3 b) { return norm(a - b); }
Vec3 normalized(Vec3 a);
// Some unit vector orthogonal to a (a must be nonzero).
Vec3 any_orthogonal(Vec3 a);

// A point in [0,1]^d, d in {2,3}. 2D points keep z = 0.
struct Point {
    Vec3 v{};
    int dim = 3;

    static Point of(double x, double y) { return {{x, y, 0.0}, 2}; }
    static Point of(double x, double y, double z) { return {{x, y, z}, 3}; }
    double operator[](int i) const { return v[i]; }
};

// Flip so the first nonzero coordinate is positive.
Vec3 canonical_direction(Vec3 d);

class Line {
public:
    Line() = default;
    // Normalizes dir and applies the canonical sign. Throws on zero direction
    // or an out-of-plane direction for 2D lines.
    Line(Point base, Vec3 dir);
    static Line through(Point a, Point b);

    const Point& base() const { return base_; }
    Vec3 dir() const { return dir_; }
    int dim() const { return base_.dim; }
    Vec3 at(double t) const { return base_.v + t * dir_; }
    // Foot of the perpendicular from q.
    Vec3 project(Vec3 q) const { return at(dot(q - base_.v, dir_)); }

private:
    Point base_{};
    Vec3 dir_{1, 0, 0};
};

// Oriented u x w x len box. half = (u/2, w/2, len/2) along frame[0..2],
// sorted ascending. frame[2] is the long axis.
struct Box {
    Vec3 center{};
    std::array<Vec3, 3> frame{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    std::array<double, 3> half{0.5, 0.5, 0.5};

    static Box make(Vec3 center, Vec3 long_axis, Vec3 thin_axis, double u, double w, double len = 1.0);
    bool contains(Vec3 q, double tol = 0) const;
    Box dilated(double s) const;
};

// Neighbourhood of half-width a/2 around a great-circle arc of length b
// centered at `center`, running in tangent direction `axis`.
struct SphericalRectangle {
    Vec3 center{0, 0, 1};
    Vec3 axis{1, 0, 0};
    double half_length = 0;  // b/2 (radians)
    double width = 0;        // a (radians)

    bool contains(Vec3 unit) const;
};

void require_same_dim(int a, int b);
double point_line_distance(const Point& p, const Line& l);
// min over signs of |a - (+/-)b|, for unit vectors.
double direction_distance(Vec3 a, Vec3 b);
// Distance between infinite lines (0 when they meet).
double line_line_distance(const Line& a, const Line& b);
// Direction term plus closest-approach distance.
double line_metric(const Line& a, const Line& b);
// Length of l inside the box (slab clipping).
double line_box_chord(const Line& l, const Box& b);

// Size of a greedy farthest-point w-net (maximal w-separated subset).
// Returns chosen indices when `picked` is non-null.
std::size_t covering_number(std::size_t n, double w, const std::function<double(std::size_t, std::size_t)>& metric,
                            std::vector<std::size_t>* picked = nullptr);
std::size_t covering_number(const std::vector<Point>& pts, double w);
std::size_t covering_number(const std::vector<Line>& lines, double w);
std::size_t covering_number_directions(const std::vector<Vec3>& dirs, double w);

}  // namespace heilbronn
