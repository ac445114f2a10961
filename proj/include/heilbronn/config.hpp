#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "heilbronn/geom.hpp"

namespace heilbronn {

using Rng = std::mt19937_64;

struct PointLinePair {
    Point p;
    Line l;

    // Projects p onto l; rejects p farther than 1e-6 from l.
    static PointLinePair make(Point p, const Line& l);
};

struct Configuration {
    int dim = 3;
    std::vector<PointLinePair> pairs;
    std::string provenance;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
    std::vector<Point> points() const;
    std::vector<Line> lines() const;
    std::vector<Vec3> directions() const;
};

// Separate point and line families (not an incident configuration).
struct PointsLines {
    int dim = 3;
    std::vector<Point> points;
    std::vector<Line> lines;
};

struct DxWitness {
    double value = 0;
    std::size_t i = 0, j = 0;  // d(p_i, l_j) attains the minimum
};

DxWitness min_config_distance_witness(const Configuration& X);
double min_config_distance(const Configuration& X);
// Checks coordinates in range and incidence; returns human-readable problems.
std::vector<std::string> validate_configuration(const Configuration& X, double tol = 1e-9);

Configuration generate_vertical(double delta, int d);
PointsLines generate_bush(double delta, int d, int n_bushes, std::uint64_t seed);
PointsLines generate_plane_example(double delta, std::uint64_t seed = 0);
PointsLines generate_st_grid(int N);
std::vector<Point> generate_erdos_parabola(int n);

Point random_point(Rng& rng, int d);
Vec3 random_direction(Rng& rng, int d);
std::vector<Point> random_points(std::size_t n, int d, std::uint64_t seed);
// Lines through uniform points of the cube with isotropic directions.
std::vector<Line> random_lines(std::size_t n, int d, std::uint64_t seed);
Configuration random_configuration(std::size_t n, int d, std::uint64_t seed);

// Index of the grid cube of side delta containing q, per axis (clamped into the cube).
std::array<long, 3> cube_index(Vec3 q, double delta, int d);

// Homothety of the delta-cube holding the anchor's point onto [0,1]^d.
Configuration rescale_config(const Configuration& X, double delta, std::size_t anchor);

struct SlabRestriction {
    Configuration config;       // 2D
    std::size_t dropped = 0;    // lines parallel to the collapsed axis
};
// Pairs with p in the box and chord >= half the long side, with the thin
// side collapsed and the other two rescaled onto [0,1]^2.
SlabRestriction slab_restriction(const Configuration& X, const Box& box);

}  // namespace heilbronn
