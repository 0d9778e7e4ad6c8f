// Concentration diagnostics and bubble extraction, validated against
// frozen analytic oracles:
//
//   * the degree-one map has |(-Delta)^{1/4} u|^2 == 1 pointwise, so
//     its local energy at radius R is half the arc measure,
//     2 arcsin(R/2), and the full-circle value is E = pi.
//   * the standard line bubble v(y) = ((1-y^2)/(1+y^2), 2y/(1+y^2))
//     satisfies |v(x)-v(y)|^2 = 4 (x-y)^2 / ((1+x^2)(1+y^2)), so its
//     truncated Gagliardo double integral has the closed form
//       J_L = int_{-L}^{L} int_{-L}^{L} 4 dx dy /((1+x^2)(1+y^2))
//           = 4 (2 arctan L)^2  ->  4 pi^2.
//   * phi_R is odd, C^1, slope R^2 at the origin, |phi'| <= R^2,
//     phi(a) = 2^N R at the junction a = 2^N / R, asymptote +-pi.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "halfflow/bubbling.hpp"
#include "halfflow/initial_data.hpp"
#include "halfflow/spectral.hpp"
#include "test_helpers.hpp"

using namespace halfflow;
using namespace halfflow::testing;

namespace {

Field bubble(const CircleGrid& g, double lambda, double x0 = 0.0) {
    InitialDataSpec spec;
    spec.kind = "bubble_pullback";
    spec.lambda = lambda;
    spec.x0 = x0;
    return make_initial(spec, g);
}

// Minimal synthetic trace from a list of (t, field) snapshots.
FlowTrace synthetic_trace(const std::vector<double>& times,
                          const std::vector<Field>& fields) {
    FlowTrace trace;
    for (size_t i = 0; i < times.size(); ++i) {
        FlowState s;
        s.t = times[i];
        s.u = fields[i];
        s.energy = half_energy(fields[i]);
        s.sphere_drift = fields[i].max_sphere_defect();
        trace.snapshots.push_back(std::move(s));
        TraceRow row;
        row.t = times[i];
        row.energy = trace.snapshots.back().energy;
        row.max_u = fields[i].max_norm();
        trace.steps.push_back(row);
    }
    trace.status = TerminalStatus::completed;
    return trace;
}

} // namespace

TEST_SUITE("bubbling") {

TEST_CASE("quarter density of the degree-one map is one") {
    const CircleGrid g{256};
    const Field qd = quarter_density(degree_map(g, 1));
    double worst = 0.0;
    for (double v : qd.values) worst = std::max(worst, std::abs(v - 1.0));
    CHECK(worst <= 1e-12);
}

TEST_CASE("local energy of the constant density is the arc measure") {
    const CircleGrid g{256};
    const Field u = degree_map(g, 1);
    for (const double R : {0.5, 1.0}) {
        const double want = 2.0 * std::asin(R / 2.0);
        CHECK(std::abs(local_energy(u, 1.3, R) - want) <= 2.0 * g.h());
    }
    // Chordal radius 2 covers the circle: the full half energy pi.
    CHECK(std::abs(local_energy(u, 0.0, 2.0) - pi) <= 1e-12);
    CHECK_THROWS_AS((void)local_energy(u, 0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)local_energy(u, 0.0, 4.0), std::invalid_argument);
}

TEST_CASE("profile matches pointwise local energy and commutes with rotation") {
    const CircleGrid g{128};
    const Field u = bubble(g, 0.2);
    const Field qd = quarter_density(u);
    const std::vector<double> prof = local_energy_profile(qd, 0.4);
    REQUIRE(static_cast<int>(prof.size()) == g.M);
    for (const int j : {0, 17, 100})
        CHECK(std::abs(prof[j] - local_energy(u, g.node(j), 0.4)) <= 1e-12);

    const int r = 9;
    const std::vector<double> rotated =
        local_energy_profile(quarter_density(rotate_nodes(u, r)), 0.4);
    for (int j = 0; j < g.M; ++j)
        CHECK(rotated[j] == prof[(j + r) % g.M]); // bitwise
}

TEST_CASE("concentration scan flags the shrinking bubble") {
    const CircleGrid g{128};
    const double x0 = g.node(30);
    const std::vector<double> times{0.0, 1.0, 2.0};
    const std::vector<Field> fields{bubble(g, 0.4, x0), bubble(g, 0.1, x0),
                                    bubble(g, 0.025, x0)};
    const FlowTrace trace = synthetic_trace(times, fields);

    const std::vector<double> radii{0.5, 0.25, 0.1};
    const ConcentrationReport rep = concentration_scan(trace, radii, 0.05);
    REQUIRE(rep.radii == radii);
    REQUIRE(rep.snapshot_times == times);
    REQUIRE(rep.table.size() == radii.size());
    for (const auto& tab : rep.table)
        CHECK(tab.size() == times.size() * static_cast<size_t>(g.M));
    REQUIRE(rep.eps_of_R.size() == radii.size());
    for (double e : rep.eps_of_R) CHECK(e >= 0.05); // a bubble concentrates

    // Every radius flags the bubble's site at the final, tightest time.
    for (size_t r = 0; r < radii.size(); ++r) {
        bool found = false;
        for (const ConcentrationFlag& f : rep.flagged_points)
            if (f.radius == radii[r] && f.t == 2.0 &&
                std::abs(wrap_angle(f.x - x0)) <= 2.0 * g.h() + 1e-12)
                found = true;
        CHECK(found);
    }
    CHECK(std::isfinite(rep.struwe_ratio));
    CHECK(std::isfinite(rep.h1_ratio));

    CHECK_THROWS_AS((void)concentration_scan(trace, {}, 0.05),
                    std::invalid_argument);
}

TEST_CASE("phi_R rescaling map properties") {
    const double R = 0.3;
    const int N = 2; // b = 2^N R = 1.2 < pi/2
    const PhiR phi = build_phi_R(R, N);
    const double a = std::pow(2.0, N) / R;
    const double b = std::pow(2.0, N) * R;
    CHECK(std::abs(phi.a - a) <= 1e-12);
    CHECK(std::abs(phi.b - b) <= 1e-12);
    CHECK(phi(0.0) == 0.0);
    CHECK(std::abs(phi(a) - b) <= 1e-12);

    // Odd, monotone, slope R^2 in the linear zone, |phi'| <= R^2.
    for (const double x : {0.5, 3.0, a - 0.1, a + 0.1, 3.0 * a, 50.0 * a}) {
        CHECK(std::abs(phi(-x) + phi(x)) <= 1e-12);
        const double d = 1e-5 * std::max(1.0, x);
        const double slope = (phi(x + d) - phi(x - d)) / (2.0 * d);
        CHECK(slope > 0.0);
        CHECK(slope <= R * R * (1.0 + 1e-6));
        if (x < a) CHECK(std::abs(slope - R * R) <= 1e-8);
    }

    // C^1 junction: one-sided slopes agree at a.
    const double d = 1e-6;
    const double left = (phi(a) - phi(a - d)) / d;
    const double right = (phi(a + d) - phi(a)) / d;
    CHECK(std::abs(left - right) <= 1e-4 * R * R);

    // Asymptote +-pi, approached from below.
    CHECK(phi(1e9) > b);
    CHECK(phi(1e9) <= pi);
    CHECK(pi - phi(1e12) <= 1e-3);

    CHECK_THROWS_AS((void)build_phi_R(0.3, 3), std::invalid_argument); // 2.4 > pi/2
    CHECK_THROWS_AS((void)build_phi_R(-1.0, 1), std::invalid_argument);
}

TEST_CASE("prop1 bookkeeping is positive on a bubble") {
    const CircleGrid g{256};
    const Field u = bubble(g, 0.1);
    const Prop1Result res = prop1_check(u, 0.0, 0.25, 2);
    CHECK(res.local_energy > 0.0);
    CHECK(res.gagliardo > 0.0);
    CHECK(std::abs(res.local_energy - local_energy(u, 0.0, 0.25)) <= 1e-12);
    CHECK_THROWS_AS((void)prop1_check(u, 0.0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("line Gagliardo energy matches the closed form") {
    const LineGrid line{50.0, 2000};
    const Field v = line_bubble(line);
    const double want = 4.0 * std::pow(2.0 * std::atan(50.0), 2.0);
    CHECK(std::abs(line_gagliardo_energy(v) - want) <= 0.05);
}

TEST_CASE("rescale extraction reproduces the concentrating profile") {
    const CircleGrid g{256};
    const double lambda = 0.1;
    const double x0 = g.node(40);
    const Field u = bubble(g, lambda, x0);
    const FlowTrace trace =
        synthetic_trace({0.0, 0.01}, std::vector<Field>{u, u});
    const CalibrationRecord calib = calibrate(g);

    const LineGrid line{50.0, 1000};
    const double R = std::sqrt(2.0 * lambda); // matches the bubble scale
    // N = 1 keeps the inflated window 2^N R = 0.894 below pi/2.
    BubbleExtract ex = rescale_extract(trace, 0.01, x0, R, 0.01, line, 1, calib);
    CHECK(ex.center == x0);
    CHECK(ex.scale == R);
    CHECK(ex.time == 0.01);
    CHECK(ex.line_field.n == 2);
    CHECK(ex.line_field.max_sphere_defect() <= 1e-9);

    // phi(0) = 0: the center sample is the field at x0 (node 500 is y = 0).
    CHECK(std::abs(ex.line_field.at(500, 0) - u.at(40, 0)) <= 1e-9);
    CHECK(std::abs(ex.line_field.at(500, 1) - u.at(40, 1)) <= 1e-9);

    // Near the center the extraction is the standard bubble profile.
    const Field ref = line_bubble(line);
    double worst_core = 0.0;
    for (int j = 0; j < line.M; ++j)
        if (std::abs(line.node(j)) <= 2.0)
            for (int c = 0; c < 2; ++c)
                worst_core = std::max(
                    worst_core, std::abs(ex.line_field.at(j, c) - ref.at(j, c)));
    CHECK(worst_core <= 0.05);

    CHECK(std::isfinite(ex.residual_l2));
    CHECK(ex.bubble_energy > 0.0);

    // Look-back window must fit inside the trace.
    CHECK_THROWS_AS((void)rescale_extract(trace, 0.01, x0, R, 10.0, line, 1, calib),
                    std::invalid_argument);
}

TEST_CASE("analytic bubble nearly solves the line equation") {
    const CalibrationRecord calib = calibrate(CircleGrid{256});
    const double coarse = bubble_residual(line_bubble(LineGrid{25.0, 1024}), calib);
    const double fine = bubble_residual(line_bubble(LineGrid{50.0, 2048}), calib);
    CHECK(fine <= 5e-2);
    CHECK(coarse > fine);

    Field off = line_bubble(LineGrid{25.0, 512});
    for (double& v : off.values) v *= 1.01;
    CHECK_THROWS_AS((void)bubble_residual(off, calib), std::domain_error);
}

TEST_CASE("inequality reports degenerate gracefully on constants") {
    const CircleGrid g{64};
    Field c(g, 2);
    for (int j = 0; j < g.M; ++j) c.at(j, 0) = 1.0;
    const FlowTrace trace =
        synthetic_trace({0.0, 1.0}, std::vector<Field>{c, c});
    CHECK(struwe_l4_report(trace, 0.3) == 0.0);
    CHECK(h1_bound_report(trace, 0.3) == 0.0);
    CHECK_THROWS_AS((void)struwe_l4_report(trace, 0.7), std::invalid_argument);
}

} // TEST_SUITE
