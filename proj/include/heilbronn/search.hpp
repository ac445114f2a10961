#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "heilbronn/config.hpp"
#include "heilbronn/geom.hpp"

namespace heilbronn {

struct AnnealSchedule {
    double T0 = 0;  // <= 0: 0.1 x the objective scale of the problem
    double cooling = 0.95;
    std::size_t moves_per_epoch = 2000;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DxAnnealResult {
    Configuration X;
    double dx = 0;                    // min_config_distance(X), evaluated afresh
    std::vector<double> best_trace;   // best objective after each epoch
    std::size_t accepted = 0;
};
// Maximizes d(X) over n pairs in [0,1]^d. `init` (optional) replaces the
// random start and must have n pairs.
DxAnnealResult anneal_max_dx(std::size_t n, int d, const AnnealSchedule& s, const Configuration* init = nullptr);

struct TriangleAnnealResult {
    std::vector<Point> P;
    double area = 0;  // min_triangle_fast(P).area
    std::vector<double> best_trace;
    std::size_t accepted = 0;
};
TriangleAnnealResult anneal_max_triangle(std::size_t n, int d, const AnnealSchedule& s,
                                         const std::vector<Point>* init = nullptr);

struct ExponentFit {
    std::string family;
    std::vector<double> ladder;               // delta or n per rung
    std::vector<double> value;                // median over seeds
    std::vector<std::vector<double>> samples; // per rung, per seed
    double slope = 0, intercept = 0, r2 = 0;
};
// log y = intercept + slope log x; needs three rungs with positive values.
ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ExponentOptions {
    int dim = 2;
    AnnealSchedule schedule{};  // for the annealing families
    std::size_t moves_per_pair = 50;   // anneal-dx: moves per epoch = max(schedule, this x n)
    // cache of finished (rung, seed) cells; consulted before and filled after each cell
    std::map<std::pair<std::size_t, std::uint64_t>, double>* cache = nullptr;
};
// Families:
//   vertical      |X| of the vertical construction vs delta
//   pipeline      triangle_via_pointline area vs n (random points)
//   anneal-dx     largest annealed |X| with d(X) >= delta vs delta
//   anneal-tri    annealed max-min triangle area vs n
ExponentFit exponent_estimate(const std::string& family, const std::vector<double>& ladder,
                              const std::vector<std::uint64_t>& seeds, const ExponentOptions& opt = {});

}  // namespace heilbronn
