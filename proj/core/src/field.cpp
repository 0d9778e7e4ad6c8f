#include "halfflow/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace halfflow {

namespace {

int grid_size(const Grid& g) {
    if (std::holds_alternative<CircleGrid>(g)) return std::get<CircleGrid>(g).M;
    return std::get<LineGrid>(g).M;
}

void check_components(int n) {
    if (n != 1 && n != 2 && n != 3)
        throw std::invalid_argument("Field: component count must be 1, 2 or 3");
}

} // namespace

Field::Field(const CircleGrid& g, int components) : grid(g), n(components) {
    check_components(n);
    values.assign(static_cast<size_t>(g.M) * n, 0.0);
}

Field::Field(const LineGrid& g, int components) : grid(g), n(components) {
    check_components(n);
    values.assign(static_cast<size_t>(g.M) * n, 0.0);
}

int Field::size() const { return grid_size(grid); }

const CircleGrid& Field::circle() const {
    if (!std::holds_alternative<CircleGrid>(grid))
        throw std::invalid_argument("Field: operation requires a circle grid");
    return std::get<CircleGrid>(grid);
}

const LineGrid& Field::line() const {
    if (!std::holds_alternative<LineGrid>(grid))
        throw std::invalid_argument("Field: operation requires a line grid");
    return std::get<LineGrid>(grid);
}

bool Field::is_circle() const { return std::holds_alternative<CircleGrid>(grid); }

double Field::max_sphere_defect() const {
    double worst = 0.0;
    const int M = size();
    for (int j = 0; j < M; ++j) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += at(j, c) * at(j, c);
        worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
    }
    return worst;
}

double Field::min_norm() const {
    double best = std::numeric_limits<double>::infinity();
    const int M = size();
    for (int j = 0; j < M; ++j) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += at(j, c) * at(j, c);
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

double Field::max_norm() const {
    double best = 0.0;
    const int M = size();
    for (int j = 0; j < M; ++j) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += at(j, c) * at(j, c);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

Field reproject(const Field& u) {
    Field out = u;
    const int M = u.size();
    for (int j = 0; j < M; ++j) {
        double s = 0.0;
        for (int c = 0; c < u.n; ++c) s += u.at(j, c) * u.at(j, c);
        const double norm = std::sqrt(s);
        if (norm <= 1e-6)
            throw std::domain_error("reproject: |u| <= 1e-6 at a node, projection undefined");
        for (int c = 0; c < u.n; ++c) out.at(j, c) = u.at(j, c) / norm;
    }
    return out;
}

double l2_norm(const Field& u) {
    double h = u.is_circle() ? u.circle().h() : u.line().dx();
    double s = 0.0;
    for (double v : u.values) s += v * v;
    return std::sqrt(h * s);
}

double l2_distance(const Field& a, const Field& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("l2_distance: field shapes differ");
    double h = a.is_circle() ? a.circle().h() : a.line().dx();
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(h * s);
}

double max_abs_difference(const Field& a, const Field& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("max_abs_difference: field shapes differ");
    double worst = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

} // namespace halfflow
