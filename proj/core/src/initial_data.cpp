#include "halfflow/initial_data.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace halfflow {

namespace {

std::vector<double> parse_args(const std::string& text, std::string& name) {
    const auto open = text.find('(');
    if (open == std::string::npos) {
        name = text;
        return {};
    }
    if (text.back() != ')')
        throw std::invalid_argument("initial data: unbalanced parentheses in '" + text + "'");
    name = text.substr(0, open);
    std::vector<double> args;
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    size_t pos = 0;
    while (pos < inner.size()) {
        size_t comma = inner.find(',', pos);
        if (comma == std::string::npos) comma = inner.size();
        const std::string tok = inner.substr(pos, comma - pos);
        size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("initial data: bad numeric argument '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size())
            throw std::invalid_argument("initial data: bad numeric argument '" + tok + "'");
        args.push_back(v);
        pos = comma + 1;
    }
    return args;
}

void expect_args(const std::string& kind, size_t got, size_t lo, size_t hi) {
    if (got < lo || got > hi)
        throw std::invalid_argument("initial data: wrong argument count for '" + kind + "'");
}

Field tangent_noise(const InitialDataSpec& spec, const CircleGrid& g, int max_mode) {
    if (max_mode < 1 || 2 * max_mode >= g.M)
        throw std::invalid_argument("initial data: noise band must fit below Nyquist");
    if (!(spec.amplitude >= 0.0))
        throw std::invalid_argument("initial data: noise amplitude must be nonnegative");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Coefficients drawn in a fixed order so the map is M-independent.
    std::vector<std::vector<double>> coef(static_cast<size_t>(spec.n) - 1);
    for (auto& comp : coef) {
        comp.resize(2 * static_cast<size_t>(max_mode));
        for (double& v : comp) v = gauss(rng);
    }
    Field u(g, spec.n);
    const double scale = spec.amplitude / max_mode;
    for (int j = 0; j < g.M; ++j) {
        const double x = g.node(j);
        double sq = 1.0;
        u.at(j, 0) = 1.0;
        for (int c = 1; c < spec.n; ++c) {
            double f = 0.0;
            for (int k = 1; k <= max_mode; ++k)
                f += coef[c - 1][2 * k - 2] * std::cos(k * x) +
                     coef[c - 1][2 * k - 1] * std::sin(k * x);
            const double v = scale * f;
            u.at(j, c) = v;
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        for (int c = 0; c < spec.n; ++c) u.at(j, c) /= norm;
    }
    return u;
}

} // namespace

InitialDataSpec parse_initial_data(const std::string& text, int n,
                                   std::uint64_t default_seed) {
    InitialDataSpec spec;
    spec.n = n;
    spec.seed = default_seed;
    std::string name;
    const std::vector<double> args = parse_args(text, name);
    spec.kind = name;
    if (name == "constant") {
        expect_args(name, args.size(), 0, 0);
    } else if (name == "great_circle") {
        expect_args(name, args.size(), 1, 1);
        spec.mode = static_cast<int>(std::lround(args[0]));
    } else if (name == "bubble_pullback") {
        expect_args(name, args.size(), 1, 2);
        spec.lambda = args[0];
        if (args.size() > 1) spec.x0 = args[1];
    } else if (name == "bandlimited_noise") {
        expect_args(name, args.size(), 2, 3);
        spec.amplitude = args[0];
        spec.max_mode = static_cast<int>(std::lround(args[1]));
        if (args.size() > 2) spec.seed = static_cast<std::uint64_t>(args[2]);
    } else if (name == "perturbed_constant") {
        expect_args(name, args.size(), 1, 2);
        spec.amplitude = args[0];
        if (args.size() > 1) spec.seed = static_cast<std::uint64_t>(args[1]);
    } else {
        throw std::invalid_argument("initial data: unknown kind '" + name + "'");
    }
    return spec;
}

Field make_initial(const InitialDataSpec& spec, const CircleGrid& g) {
    if (spec.n < 2)
        throw std::invalid_argument("initial data: target dimension must be at least 2");
    if (spec.kind == "constant") {
        Field u(g, spec.n);
        for (int j = 0; j < g.M; ++j) u.at(j, 0) = 1.0;
        return u;
    }
    if (spec.kind == "great_circle") {
        const int k = spec.mode;
        if (k == 0 || 2 * std::abs(k) >= g.M)
            throw std::invalid_argument("initial data: great_circle mode must be nonzero and below Nyquist");
        Field u(g, spec.n);
        for (int j = 0; j < g.M; ++j) {
            const double x = g.node(j);
            u.at(j, 0) = std::cos(k * x);
            u.at(j, 1) = std::sin(k * x);
        }
        return u;
    }
    if (spec.kind == "bubble_pullback") {
        if (!(spec.lambda > 0.0))
            throw std::invalid_argument("initial data: bubble scale must be positive");
        Field u(g, spec.n);
        for (int j = 0; j < g.M; ++j) {
            // Chart y = tan((x-x0)/2) scaled by 1/lambda, evaluated
            // through c, s to stay finite at the antipode.
            const double half = 0.5 * (g.node(j) - spec.x0);
            const double c = spec.lambda * std::cos(half);
            const double s = std::sin(half);
            const double den = c * c + s * s;
            u.at(j, 0) = (c * c - s * s) / den;
            u.at(j, 1) = 2.0 * c * s / den;
        }
        return u;
    }
    if (spec.kind == "bandlimited_noise") return tangent_noise(spec, g, spec.max_mode);
    if (spec.kind == "perturbed_constant") return tangent_noise(spec, g, 4);
    throw std::invalid_argument("initial data: unknown kind '" + spec.kind + "'");
}

} // namespace halfflow
