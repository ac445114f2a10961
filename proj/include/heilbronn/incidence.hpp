#pragma once

#include <string>
#include <vector>

#include "heilbronn/config.hpp"
#include "heilbronn/geom.hpp"

namespace heilbronn {

// Radial bump chi at unit scale: 1 on r <= r1, smootherstep join down to 0
// at r2, with r2 solved so that the integral over R^d is 1.
struct BumpProfile {
    int dim = 3;
    double r1 = 0.5;
    double r2 = 0;
    double operator()(double r) const;
    double integral() const;  // numerical, over R^d
};
const BumpProfile& bump_profile(int d);

// eta_1 = chi_1 * chi_{1/2} as a radial table, plus its line integral
// phi(t) = int eta_1(sqrt(s^2 + t^2)) ds. Scale w follows by homogeneity.
class EtaKernel {
public:
    explicit EtaKernel(int d, std::size_t n = 2048);
    int dim() const { return dim_; }
    double support() const { return support_; }  // 1.5 r2 <= 3
    double eta1(double r) const;
    double phi1(double t) const;
    double mass() const;  // integral of the table over R^d
    const std::vector<double>& eta_table() const { return eta_; }
    double table_step() const { return h_; }

private:
    int dim_;
    double support_, h_;
    std::vector<double> eta_, phi_;
};
const EtaKernel& eta_kernel_table(int d);

double eta_kernel(double w, const Vec3& x, int d);

// sum over pairs of w^{d-1} int_l eta_w(x - p) dx, i.e. sum of phi(d(p,l)/w)
double incidence_count(double w, const std::vector<Point>& P, const std::vector<Line>& L);
double normalized_b(double w, const std::vector<Point>& P, const std::vector<Line>& L);

struct ScanRow {
    double w = 0;
    double B = 0;
    double diff = 0;  // |B(previous row) - B(w)|, 0 on the first row
    std::size_t mp = 0, ml = 0;
    double rhs_basic = 0;
    double rhs_refined = 0;  // 3D only, 0 otherwise
    double ratio = 0;        // diff^2 / rhs_basic
};
struct MultiscaleReport {
    int dim = 3;
    std::vector<ScanRow> rows;
};
MultiscaleReport dyadic_scan(const std::vector<Point>& P, const std::vector<Line>& L, double w_min, double w_max,
                             double eps = 0);

// Basic high-low right-hand side: delta^{-3} (2D) or delta^{-6-eps} (3D)
// times M_P(delta)/|P| times M_L(delta x delta x 1)/|L|.
double rhs_basic(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double eps = 0);

struct RefinedRhs {
    double value = 0;
    double u = 0;  // maximizing dyadic u
};
// Direction-limited refinement, 3D only.
RefinedRhs rhs_refined(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double eps = 0);

// Direction-limited bound with hypotheses |theta(L)|_delta <= nu delta^-2 and
// M_L(delta x delta/u x 1) <= u^{-2+kappa} M. Throws HypothesisViolation
// naming the offending u.
double rhs_direction_limited(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double nu,
                             double kappa, double M, double eps = 0);

inline double wellspaced_alpha(double t1, double t2) { return (t1 + 2) / (2 * t1 + 2 * t2); }

struct WellSpacedRhs {
    double value = 0;
    double alpha = 0;
    double lhs = 0;  // |B(delta/2) - B(delta)|^{9/2}
    double measured_A = 0, measured_C0 = 0, measured_K = 0;
};
// Rescaled-hairbrush bound; the C_0 exponent is pinned to 1. Hypotheses
// (M_P(delta) <= A delta^3 |P|, C_0-uniformity, Katz-Tao (t1,t2,K)) are
// measured and a HypothesisViolation is thrown if any fails.
WellSpacedRhs rhs_wellspaced(double delta, const std::vector<Point>& P, const std::vector<Line>& L, double t1,
                             double t2, double K, double A, double C0, double eps = 0);

// Smallest C_0 for which L is C_0-uniform at scale delta: every line has at
// least M_L(delta x delta x 1)/C_0 lines whose trace in the ball around the
// unit cube stays within delta of it.
double uniformity_constant(const std::vector<Line>& L, double delta);

struct ScaleCheck {
    double w = 0;
    double lhs = 0, rhs = 0;
    double slack = 0;  // rhs / lhs: the factor needed for lhs >= rhs
    std::size_t cover_theta = 0, cover_points = 0, cover_lines = 0;
};
// B(w) against |theta[X_w]|_w / (w^{d-1} |L[X]|_w).
ScaleCheck initial_estimate_check(const Configuration& X, double w, std::size_t anchor = 0);
// |L[X]|_w against w |theta[X_w]|_w |P[X]|_w.
ScaleCheck double_count_check(const Configuration& X, double w, std::size_t anchor = 0);

}  // namespace heilbronn
