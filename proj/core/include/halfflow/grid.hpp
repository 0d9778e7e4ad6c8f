#pragma once

#include <cstddef>
#include <variant>

namespace halfflow {

// Uniform periodic grid on the circle of circumference 2*pi.
// Nodes x_j = 2*pi*j/M, spacing h = 2*pi/M.  M must be even and >= 8;
// even M keeps the half-offset points y_m = x + (m + 1/2) h disjoint
// from the node set for every node x.
struct CircleGrid {
    int M = 0;

    CircleGrid() = default;
    explicit CircleGrid(int nodes);

    double h() const;
    double node(int j) const;      // x_j, j in [0, M)
    double half_node(int j) const; // x_j + h/2

    bool operator==(const CircleGrid&) const = default;
};

// Uniform grid on the symmetric interval [-L, L), used for rescaled
// bubble profiles.  Nodes x_j = -L + j * (2L/M); the right endpoint is
// not a node.
struct LineGrid {
    double L = 0.0;
    int M = 0;

    LineGrid() = default;
    LineGrid(double half_width, int nodes);

    double dx() const;
    double node(int j) const;
    double mid_node(int j) const; // x_j + dx/2

    bool operator==(const LineGrid&) const = default;
};

using Grid = std::variant<CircleGrid, LineGrid>;

// Chordal distance on the circle: |x - y| = 2 |sin((x - y)/2)|.
// This is the metric used by every singular kernel on the circle.
double chordal_distance(double x, double y);

// Angle wrapped to [-pi, pi).
double wrap_angle(double x);

} // namespace halfflow
