#pragma once

#include <cstdint>
#include <vector>

#include "heilbronn/config.hpp"
#include "heilbronn/geom.hpp"

namespace heilbronn {

// Powers of two from hi down to (and including) the first value <= lo.
std::vector<double> dyadic_ladder(double hi, double lo);

// Max number of points in a w-cube, over the grids offset by multiples of w/2.
std::size_t m_points(const std::vector<Point>& P, double w);

struct LineConcentration {
    std::size_t count = 0;
    Box box;
    std::size_t anchors_used = 0;
};

// Approximate max over u x w x 1 boxes of #{l : |l cap box| >= 1/2}.
// In 2D the box is a u x 1 rectangle and w is ignored.
class LineIndex {
public:
    explicit LineIndex(std::vector<Line> lines);
    LineConcentration max_box(double u, double w) const;
    // Number of lines with chord >= half the long side.
    std::size_t count_in(const Box& b) const;
    const std::vector<Line>& lines() const { return lines_; }
    int dim() const { return dim_; }
    // Indices of lines whose direction is within chordal distance tau of +/-e.
    void near_direction(Vec3 e, double tau, std::vector<std::size_t>& out) const;

    std::size_t work_budget = 40'000'000;

private:
    std::vector<Line> lines_;
    int dim_ = 3;
    double cell_ = 1.0 / 16;
    long G_ = 32;
    std::vector<std::size_t> start_, items_;
};

LineConcentration m_lines_box(const std::vector<Line>& L, double u, double w);
std::size_t m_lines(const std::vector<Line>& L, double u, double w);

// Anchored at members of X: max over anchors of pairs within point distance
// u, direction distance v and line distance w.
std::size_t m_config(const Configuration& X, double u, double v, double w);

struct CoveringRow {
    double w = 0;
    std::size_t points = 0, lines = 0, dirs = 0;
    std::size_t mx_points = 0, mx_lines = 0, mx_dirs = 0;  // M_X(w,1,1), M_X(1,1,w), M_X(1,w,1)
    // covering number times the matching concentration, over |X|
    double ratio_points = 0, ratio_lines = 0, ratio_dirs = 0;
};
std::vector<CoveringRow> covering_profiles(const Configuration& X, const std::vector<double>& ladder);

struct KatzTaoCell {
    double u = 0, w = 0;
    std::size_t count = 0;
    double residual = 0;
};
struct KatzTaoFit {
    int dim = 3;
    double t1 = 0, t2 = 0;  // in 2D only t1 is fitted
    double C = 0;
    std::vector<KatzTaoCell> cells;
    std::size_t populated = 0;
};
// Least squares of log M_L(u x w x 1) on log(u/delta), log(w/delta) over the
// dyadic grid, using cells holding at least two lines.
KatzTaoFit katz_tao_fit(const std::vector<Line>& L, double delta);
// Smallest K with M_L(u x w x 1) <= K (u/delta)^t1 (w/delta)^t2 on the dyadic grid.
double katz_tao_constant(const std::vector<Line>& L, double delta, double t1, double t2);

struct PlaneRow {
    double u = 0, w = 0;
    std::size_t measured = 0;
    double bound = 0, ratio = 0;
    std::size_t slab_pairs = 0;
    double slab_separation = 0;  // d of the 2D image (0 if < 2 pairs)
    double slab_bound = 0;       // (u/w)^{-2+gamma}
};
struct PlaneReport {
    double delta = 0, gamma = 0, dx = 0;
    bool precondition_ok = false;
    double fitted_constant = 0;
    std::vector<PlaneRow> rows;
};
PlaneReport plane_reduction_check(const Configuration& X, double delta, double gamma);

struct UniformityCertificate {
    double K = 0;
    std::vector<double> scales;                 // K^-1 .. K^-m
    std::vector<double> worst_ratio;            // indexed (i*m + j)*m + k
    double min_ratio = 0;
    bool separation_enforced = false;
    double separation_constant = 4;
    std::size_t input_size = 0, output_size = 0, rounds = 0;
    bool valid() const { return min_ratio >= 1.0 / K - 1e-12; }
};

struct UniformizeOptions {
    bool enforce_separation = false;
    double separation_constant = 4;  // C_d
};

struct Uniformized {
    Configuration X;
    std::vector<std::size_t> kept;  // indices into the input
    UniformityCertificate cert;
};
Uniformized uniformize(const Configuration& X, double K, double delta, const UniformizeOptions& opt = {});
// Recomputes the certificate ratios for X at the given ladder, independently.
double uniformity_ratio(const Configuration& X, const std::vector<double>& scales);

std::vector<double> direction_profile(const Configuration& X, double w, double delta, std::size_t anchor = 0);

}  // namespace heilbronn
