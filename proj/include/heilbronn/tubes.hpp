#pragma once

#include <cstdint>
#include <vector>

#include "heilbronn/config.hpp"
#include "heilbronn/geom.hpp"

namespace heilbronn {

// Segment tube: |axial| <= length/2, lateral distance <= width/2.
// In 2D a width x length rectangle, in 3D a cylinder of diameter width.
struct Tube {
    int dim = 2;
    Vec3 center{};
    Vec3 dir{1, 0, 0};
    double width = 0;
    double length = 1;

    static Tube make(int dim, Vec3 center, Vec3 dir, double width, double length = 1);
    double axial(Vec3 p) const { return dot(p - center, dir); }
    double lateral(Vec3 p) const;
    // membership in the tube scaled by s about its center (both sides)
    bool contains(Vec3 p, double s = 1) const;
    Vec3 start() const { return center - (length / 2) * dir; }
    Line axis() const;
    double volume() const;
};

struct Interval {
    double a = 0, b = 0;
};

// Y(T) as disjoint axial intervals of [0, length], measured from start().
struct Shading {
    std::vector<std::vector<Interval>> parts;

    static Shading full(const std::vector<Tube>& T);
    double density(std::size_t i, const Tube& t) const;
    double min_density(const std::vector<Tube>& T) const;
};
void validate_shading(const std::vector<Tube>& T, const Shading& Y);
// k random disjoint pieces per tube with total density lambda
Shading random_shading(const std::vector<Tube>& T, double lambda, int pieces, std::uint64_t seed);

// Net points lying in at least r of the regions.
std::vector<Vec3> rich_points(const std::vector<Vec3>& net, const std::vector<Tube>& regions, std::size_t r);

struct TwoEndsOptions {
    double C1 = 4;   // rich threshold r = C1 Delta^-2 |T|^{1/2}
    int rounds = 0;  // 0: ceil(3 log_{2/Delta}(1/delta))
    std::size_t strip_cells = 1 << 24;
};

struct TwoEndsResult {
    double delta = 0, Delta = 0, C1 = 0, r = 0;
    int m = 0, rounds_run = 0;
    std::vector<Tube> U;                            // Delta*len x 8 delta
    std::vector<std::vector<std::size_t>> U_of_T;   // indices into U
    std::vector<std::vector<Tube>> excised;         // the half Delta*len x 4 delta pieces
    std::size_t overlap = 0;                        // max multiplicity of 2T minus its U's on the net
    double overlap_constant = 0;                    // overlap / (Delta^-2 |T|^{1/2})
    std::size_t max_U_per_T = 0;
    double U_constant = 0;                          // max |U(T)| / log_{2/Delta}(1/delta)
    std::size_t coaxial_violations = 0;
};

// Planar tubes of common width delta inside [-2,2]^2.
TwoEndsResult two_ends_decompose(const std::vector<Tube>& T, double delta, double Delta, const TwoEndsOptions& opt = {});

// gnomonic chart at a unit vector c: tangent-plane coordinates (z = 0)
struct GnomonicChart {
    Vec3 c, e1, e2;
    explicit GnomonicChart(Vec3 c);
    Vec3 project(Vec3 x) const;
    Vec3 lift(Vec3 q) const;
};

struct SphericalTwoEndsResult {
    std::vector<SphericalRectangle> U;
    std::vector<std::vector<std::size_t>> U_of_T;
    std::size_t pieces = 0, balls_used = 0;
    std::size_t overlap = 0;  // max over balls
    double overlap_constant = 0;
    std::size_t max_U_per_T = 0;
    std::vector<TwoEndsResult> per_ball;
};
inline constexpr double kSphereConstant = 0.1;  // c in the parameter constraints, also the ball radius
SphericalTwoEndsResult spherical_two_ends(const std::vector<SphericalRectangle>& T, double delta, double Delta,
                                          double b, const TwoEndsOptions& opt = {});

// |union of Y(T)| by counting grid-cell centres, cell side = resolution.
double shading_union_volume(const std::vector<Tube>& T, const Shading& Y, double resolution);

struct BrushReport {
    double volume = 0, bound = 0;
    double fitted_constant = 0;  // bound / volume
    double lambda = 0, measured_K = 0, exponent = 0;
    bool holds = false;          // fitted_constant <= 1e3
};
// Planar hairbrush: delta^eps K^-1 lambda^2 delta^t u^{1-t} |T| (u = 1 for the plain version).
BrushReport check_planar_brush(const std::vector<Tube>& T, const Shading& Y, double t, double K, double eps,
                               double u = 1);
// Space hairbrush: delta^eps K^-b lambda^{5/2} delta^2 |T|^b, b = (2+t1)/(2t1+2t2).
BrushReport check_space_brush(const std::vector<Tube>& T, const Shading& Y, double t1, double t2, double K,
                              double eps);
inline double hairbrush_exponent(double t1, double t2) { return (2 + t1) / (2 * t1 + 2 * t2); }

struct KatzTaoTubes {
    std::vector<Tube> tubes;
    bool complete = true;
    std::size_t attempts = 0;
};
// Rejection sampling against C (u/delta)^t1 (w/delta)^t2 on boxes around each new tube.
KatzTaoTubes generate_katz_tao_tubes(double delta, double t1, double t2, std::size_t count, std::uint64_t seed,
                                     int dim = 3, double C = 1);

std::vector<Line> tube_axes(const std::vector<Tube>& T);

}  // namespace heilbronn
