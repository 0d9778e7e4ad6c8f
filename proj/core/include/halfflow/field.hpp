#pragma once

#include <vector>

#include "halfflow/grid.hpp"

namespace halfflow {

// Sampled map from a grid into R^n, n in {2, 3}.  Values are stored
// row-major: values[j*n + c] is component c at node j.  A Field does
// not enforce the sphere constraint; on_sphere() measures the worst
// deviation so callers can validate against their own tolerance.
struct Field {
    Grid grid;
    int n = 0;
    std::vector<double> values;

    Field() = default;
    Field(const CircleGrid& g, int components);
    Field(const LineGrid& g, int components);

    int size() const; // node count of the underlying grid

    double& at(int j, int c) { return values[static_cast<size_t>(j) * n + c]; }
    double at(int j, int c) const { return values[static_cast<size_t>(j) * n + c]; }

    const CircleGrid& circle() const; // throws unless the grid is a CircleGrid
    const LineGrid& line() const;     // throws unless the grid is a LineGrid
    bool is_circle() const;

    double max_sphere_defect() const; // max_j | |u(x_j)| - 1 |
    double min_norm() const;          // min_j |u(x_j)|
    double max_norm() const;          // max_j |u(x_j)|
};

// Pointwise renormalization u / |u|.  Throws if min_j |u(x_j)| <= 1e-6.
Field reproject(const Field& u);

// Discrete L2 norm sqrt(h * sum_j |u(x_j)|^2) over all components.
double l2_norm(const Field& u);

// L2 norm of the difference of two fields on the same grid.
double l2_distance(const Field& a, const Field& b);

double max_abs_difference(const Field& a, const Field& b);

} // namespace halfflow
