#pragma once

#include <array>
#include <vector>

#include "heilbronn/geom.hpp"

namespace heilbronn {

struct TriangleWitness {
    std::array<std::size_t, 3> idx{0, 0, 0};  // sorted ascending
    double area = 0;
};

// Total order used for ties: area first, then the index triple.
bool witness_less(const TriangleWitness& a, const TriangleWitness& b);
// Area of (P[i],P[j],P[k]) evaluated with sorted indices, so every route
// produces bit-identical values.
double triangle_area(const std::vector<Point>& P, std::size_t i, std::size_t j, std::size_t k);

TriangleWitness min_triangle_brute(const std::vector<Point>& P);
TriangleWitness min_triangle_fast(const std::vector<Point>& P);

struct ClosePair {
    std::size_t a = 0, b = 0;
    double length = 0;
};
// floor(n/4) disjoint pairs, each the closest pair among the points still
// available when it is extracted.
std::vector<ClosePair> greedy_close_pairs(const std::vector<Point>& P);

struct PipelineReport {
    std::size_t m = 0;            // number of pairs / lines
    double delta = 0;             // min_{i != j} d(p_i, l_j)
    double max_pair_length = 0;
    double implied_bound = 0;     // max_pair_length * delta / 2
    bool degenerate_pair = false;
};

// Pairs close points, runs the point-line reduction and returns the
// triangle p_i p_j q_j certifying area <= |p_j q_j| delta / 2.
TriangleWitness triangle_via_pointline(const std::vector<Point>& P, PipelineReport* report = nullptr);

}  // namespace heilbronn
