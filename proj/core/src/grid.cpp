#include "halfflow/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace halfflow {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

CircleGrid::CircleGrid(int nodes) : M(nodes) {
    if (M < 8 || M % 2 != 0)
        throw std::invalid_argument("CircleGrid: node count must be even and >= 8");
}

double CircleGrid::h() const { return two_pi / M; }
double CircleGrid::node(int j) const { return two_pi * j / M; }
double CircleGrid::half_node(int j) const { return two_pi * (j + 0.5) / M; }

LineGrid::LineGrid(double half_width, int nodes) : L(half_width), M(nodes) {
    if (L <= 0.0)
        throw std::invalid_argument("LineGrid: half width must be positive");
    if (M < 8)
        throw std::invalid_argument("LineGrid: node count must be >= 8");
}

double LineGrid::dx() const { return 2.0 * L / M; }
double LineGrid::node(int j) const { return -L + j * dx(); }
double LineGrid::mid_node(int j) const { return -L + (j + 0.5) * dx(); }

double chordal_distance(double x, double y) {
    return 2.0 * std::abs(std::sin(0.5 * (x - y)));
}

double wrap_angle(double x) {
    double w = std::remainder(x, two_pi);
    if (w >= std::numbers::pi) w -= two_pi;
    if (w < -std::numbers::pi) w += two_pi;
    return w;
}

} // namespace halfflow
