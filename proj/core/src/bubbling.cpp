#include "halfflow/bubbling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "halfflow/fft.hpp"
#include "halfflow/offdiag.hpp"
#include "halfflow/parallel.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double pi = std::numbers::pi;

// Trapezoid weights for the snapshot times of a trace.
std::vector<double> time_weights(const std::vector<FlowState>& snaps) {
    const size_t K = snaps.size();
    std::vector<double> w(K, 0.0);
    for (size_t i = 0; i + 1 < K; ++i) {
        const double dt = snaps[i + 1].t - snaps[i].t;
        w[i] += 0.5 * dt;
        w[i + 1] += 0.5 * dt;
    }
    return w;
}

// Mid-node samples on the line, frozen to the last node at the right edge.
// Cubic 4-point interpolation: a 2-point average carries an O(dx^2)
// error that the near-diagonal 1/d^2 weights of the principal-value sums
// amplify into an O(dx) bias of the residual; the cubic stencil keeps the
// interpolation error at O(dx^4) so those sums stay quadrature-limited.
std::vector<double> line_mid_values(const Field& v) {
    const LineGrid& g = v.line();
    std::vector<double> mid(static_cast<size_t>(g.M) * v.n);
    const auto value = [&](int m, int c) -> double {
        if (m + 1 >= g.M) return v.at(g.M - 1, c); // beyond the last node
        if (g.M < 4) return 0.5 * (v.at(m, c) + v.at(m + 1, c));
        if (m == 0)
            return (5.0 * v.at(0, c) + 15.0 * v.at(1, c) - 5.0 * v.at(2, c) +
                    v.at(3, c)) /
                   16.0;
        if (m + 2 >= g.M)
            return (5.0 * v.at(g.M - 1, c) + 15.0 * v.at(g.M - 2, c) -
                    5.0 * v.at(g.M - 3, c) + v.at(g.M - 4, c)) /
                   16.0;
        return (-v.at(m - 1, c) + 9.0 * v.at(m, c) + 9.0 * v.at(m + 1, c) -
                v.at(m + 2, c)) /
               16.0;
    };
    for (int m = 0; m < g.M; ++m)
        for (int c = 0; c < v.n; ++c)
            mid[static_cast<size_t>(m) * v.n + c] = value(m, c);
    return mid;
}

} // namespace

Field quarter_density(const Field& u) {
    const CircleGrid& g = u.circle();
    Field w = apply_circulant(u, quarter_laplacian_kernel(g));
    Field qd(g, 1);
    for (int j = 0; j < g.M; ++j) {
        double s = 0.0;
        for (int c = 0; c < u.n; ++c) s += w.at(j, c) * w.at(j, c);
        qd.at(j, 0) = s;
    }
    return qd;
}

double local_energy(const Field& u, double x0, double R) {
    if (!(R > 0.0 && R < pi))
        throw std::invalid_argument("local_energy: radius must lie in (0, pi)");
    const CircleGrid& g = u.circle();
    Field qd = quarter_density(u);
    double acc = 0.0;
    for (int j = 0; j < g.M; ++j)
        if (chordal_distance(g.node(j), x0) <= R) acc += qd.at(j, 0);
    return 0.5 * g.h() * acc;
}

std::vector<double> local_energy_profile(const Field& qd, double R) {
    const CircleGrid& g = qd.circle();
    if (!(R > 0.0 && R < pi))
        throw std::invalid_argument("local_energy_profile: radius must lie in (0, pi)");
    const int M = g.M;
    const double h = g.h();

    // Offsets are classified once from the offset angle alone, so the
    // window and its summation order are identical at every center.
    std::vector<int> members;
    for (int m = 1; m < M / 2; ++m)
        if (2.0 * std::abs(std::sin(0.5 * m * h)) <= R) members.push_back(m);
    const bool antipodal = 2.0 <= R;

    std::vector<double> profile(static_cast<size_t>(M));
    parallel_for(M, [&](int begin, int end) {
        for (int c = begin; c < end; ++c) {
            double acc = qd.at(c, 0);
            for (int m : members) {
                const int up = c + m < M ? c + m : c + m - M;
                const int dn = c - m >= 0 ? c - m : c - m + M;
                acc += qd.at(up, 0) + qd.at(dn, 0);
            }
            if (antipodal) {
                const int op = c + M / 2 < M ? c + M / 2 : c - M / 2;
                acc += qd.at(op, 0);
            }
            profile[c] = 0.5 * h * acc;
        }
    });
    return profile;
}

ConcentrationReport concentration_scan(const FlowTrace& trace,
                                       const std::vector<double>& radii,
                                       double eps1) {
    if (trace.snapshots.empty())
        throw std::invalid_argument("concentration_scan: trace has no snapshots");
    if (radii.empty())
        throw std::invalid_argument("concentration_scan: radii list is empty");
    const CircleGrid& g = trace.snapshots.front().u.circle();
    const size_t S = trace.snapshots.size();

    ConcentrationReport rep;
    rep.radii = radii;
    rep.eps1 = eps1;
    rep.snapshot_times.resize(S);
    rep.table.assign(radii.size(), std::vector<double>(S * g.M, 0.0));
    rep.eps_of_R.assign(radii.size(), 0.0);

    for (size_t s = 0; s < S; ++s) {
        const FlowState& snap = trace.snapshots[s];
        rep.snapshot_times[s] = snap.t;
        Field qd = quarter_density(snap.u);
        for (size_t r = 0; r < radii.size(); ++r) {
            const std::vector<double> profile = local_energy_profile(qd, radii[r]);
            for (int j = 0; j < g.M; ++j) {
                const double e = profile[j];
                rep.table[r][s * g.M + j] = e;
                if (e > rep.eps_of_R[r]) rep.eps_of_R[r] = e;
                if (e >= eps1)
                    rep.flagged_points.push_back({snap.t, g.node(j), radii[r], e});
            }
        }
    }

    if (trace.snapshots.size() >= 2) {
        const double mid = radii[radii.size() / 2];
        rep.struwe_ratio = struwe_l4_report(trace, std::min(mid, 0.499));
        rep.h1_ratio = h1_bound_report(trace, mid);
    }
    return rep;
}

double struwe_l4_report(const FlowTrace& trace, double R) {
    if (trace.snapshots.size() < 2)
        throw std::invalid_argument("struwe_l4_report: need at least two snapshots");
    if (!(R > 0.0 && R < 0.5))
        throw std::invalid_argument("struwe_l4_report: radius must lie in (0, 1/2)");
    const auto& snaps = trace.snapshots;
    const CircleGrid& g = snaps.front().u.circle();
    const double h = g.h();
    const std::vector<double> w = time_weights(snaps);

    double lhs = 0.0, half_sq = 0.0, quarter_sq = 0.0, supE = 0.0;
    for (size_t s = 0; s < snaps.size(); ++s) {
        Field qd = quarter_density(snaps[s].u);
        Field fl = frac_laplacian(snaps[s].u, 0.5);
        double l4 = 0.0, l2q = 0.0, l2h = 0.0;
        for (int j = 0; j < g.M; ++j) {
            l4 += qd.at(j, 0) * qd.at(j, 0);
            l2q += qd.at(j, 0);
        }
        for (size_t i = 0; i < fl.values.size(); ++i) l2h += fl.values[i] * fl.values[i];
        lhs += w[s] * h * l4;
        quarter_sq += w[s] * h * l2q;
        half_sq += w[s] * h * l2h;
        for (double e : local_energy_profile(qd, R)) supE = std::max(supE, e);
    }
    // Densities of a genuinely constant trace are pure FFT round-off
    // (~1e-17 pointwise), so both sides sit at ~1e-34 rather than exactly
    // zero; treat sub-floor magnitudes as the degenerate 0/0 case.
    constexpr double floor = 1e-20;
    const double rhs = supE * (half_sq + quarter_sq / (R * R));
    if (rhs <= floor)
        return lhs <= floor ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

double h1_bound_report(const FlowTrace& trace, double R) {
    if (trace.snapshots.size() < 2)
        throw std::invalid_argument("h1_bound_report: need at least two snapshots");
    if (!(R > 0.0))
        throw std::invalid_argument("h1_bound_report: radius must be positive");
    const auto& snaps = trace.snapshots;
    const std::vector<double> w = time_weights(snaps);

    double grad_sq = 0.0;
    for (size_t s = 0; s < snaps.size(); ++s) {
        SpectralField su = to_spectral(snaps[s].u);
        double l2 = 0.0; // int |dx u|^2 = 2 pi sum k^2 |hat u|^2
        for (int c = 0; c < su.n; ++c)
            for (int i = 0; i < su.grid.M; ++i) {
                const double k = su.wavenumber(i);
                l2 += k * k * std::norm(su.coeffs[c][i]);
            }
        grad_sq += w[s] * 2.0 * pi * l2;
    }
    // The recorded energy of a constant trace is round-off, not exact zero;
    // treat sub-floor energies as degenerate.
    const double E0 = snaps.front().energy;
    if (E0 <= 1e-20) return 0.0;
    const double T = snaps.back().t - snaps.front().t;
    return grad_sq / (E0 * (1.0 + T / (R * R)));
}

Prop1Result prop1_check(const Field& u, double x0, double R, int N) {
    if (N < 0) throw std::invalid_argument("prop1_check: N must be nonnegative");
    const double inflated = std::ldexp(R, N); // 2^N R
    if (!(R > 0.0) || inflated >= pi)
        throw std::invalid_argument("prop1_check: requires 0 < 2^N R < pi");
    Prop1Result res;
    res.local_energy = local_energy(u, x0, R);
    const Arc ball{x0, inflated};
    res.gagliardo = gagliardo_local(u, ball, ball);
    return res;
}

double PhiR::operator()(double x) const {
    const double ax = std::abs(x);
    if (ax <= a) return R * R * x;
    const double tail = b + (pi - b) * (2.0 / pi) * std::atan(kappa * (ax - a));
    return x < 0.0 ? -tail : tail;
}

PhiR build_phi_R(double R, int N) {
    if (!(R > 0.0) || N < 0)
        throw std::invalid_argument("build_phi_R: requires R > 0 and N >= 0");
    PhiR phi;
    phi.R = R;
    phi.N = N;
    phi.b = std::ldexp(R, N);
    if (!(phi.b < 0.5 * pi))
        throw std::invalid_argument("build_phi_R: requires 2^N R < pi/2");
    phi.a = std::ldexp(1.0, N) / R;
    // C^1 junction: phi'(a+) = (pi - b)(2/pi) kappa = R^2.
    phi.kappa = pi * R * R / (2.0 * (pi - phi.b));
    return phi;
}

double line_gagliardo_energy(const Field& v) {
    const LineGrid& g = v.line();
    const double dx = g.dx();
    const std::vector<double> mid = line_mid_values(v);

    std::vector<double> row(static_cast<size_t>(g.M), 0.0);
    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const double xi = g.node(i);
            double acc = 0.0;
            for (int m = 0; m < g.M; ++m) {
                const double d = xi - g.mid_node(m);
                double sq = 0.0;
                for (int c = 0; c < v.n; ++c) {
                    const double diff = v.at(i, c) - mid[static_cast<size_t>(m) * v.n + c];
                    sq += diff * diff;
                }
                acc += sq / (d * d);
            }
            row[i] = acc;
        }
    });
    double total = 0.0;
    for (int i = 0; i < g.M; ++i) total += row[i];
    return dx * dx * total;
}

double bubble_residual(const Field& v, const CalibrationRecord& calib) {
    const LineGrid& g = v.line();
    if (v.max_sphere_defect() > 1e-6)
        throw std::domain_error("bubble_residual: field is off the sphere");
    const double dx = g.dx();
    const double L = g.L;
    const std::vector<double> mid = line_mid_values(v);

    std::vector<double> contrib(static_cast<size_t>(g.M), 0.0);
    parallel_for(g.M, [&](int begin, int end) {
        std::vector<double> pv(v.n), res(v.n);
        for (int i = begin; i < end; ++i) {
            const double xi = g.node(i);
            if (std::abs(xi) > 0.5 * L) continue;
            std::fill(pv.begin(), pv.end(), 0.0);
            double density = 0.0;
            for (int m = 0; m < g.M; ++m) {
                const double d = xi - g.mid_node(m);
                const double w = dx / (d * d);
                double sq = 0.0;
                for (int c = 0; c < v.n; ++c) {
                    const double diff = v.at(i, c) - mid[static_cast<size_t>(m) * v.n + c];
                    pv[c] += w * diff;
                    sq += diff * diff;
                }
                density += w * sq;
            }
            // Tails freeze v at the boundary values: int_L^inf dy/(y-x)^2
            // = 1/(L-x) on the right, 1/(x+L) on the left.
            const double wr = 1.0 / (L - xi);
            const double wl = 1.0 / (xi + L);
            double sqr = 0.0, sql = 0.0;
            for (int c = 0; c < v.n; ++c) {
                const double dr = v.at(i, c) - v.at(g.M - 1, c);
                const double dl = v.at(i, c) - v.at(0, c);
                pv[c] += wr * dr + wl * dl;
                sqr += dr * dr;
                sql += dl * dl;
            }
            density += wr * sqr + wl * sql;

            double rsq = 0.0;
            for (int c = 0; c < v.n; ++c) {
                const double r =
                    calib.C_pv * pv[c] -
                    calib.nonlinearity_factor * v.at(i, c) * density;
                rsq += r * r;
            }
            contrib[i] = rsq;
        }
    });
    double total = 0.0;
    for (int i = 0; i < g.M; ++i) total += contrib[i];
    return std::sqrt(dx * total);
}

BubbleExtract rescale_extract(const FlowTrace& trace, double t_n, double x_n,
                              double R_n, double gamma, const LineGrid& line,
                              int N, const CalibrationRecord& calib) {
    const auto& snaps = trace.snapshots;
    if (snaps.empty())
        throw std::invalid_argument("rescale_extract: trace has no snapshots");
    if (!(R_n > 0.0) || gamma < 0.0)
        throw std::invalid_argument("rescale_extract: requires R_n > 0 and gamma >= 0");
    const double t0 = snaps.front().t;
    const double t1 = snaps.back().t;
    const double span = std::max(t1 - t0, 1.0);
    if (t_n > t1 + 1e-12 * span || t_n - gamma * R_n * R_n < t0 - 1e-12 * span)
        throw std::invalid_argument(
            "rescale_extract: look-back window leaves the trace range");

    // Linear time interpolation between the bracketing snapshots.
    size_t hi = 0;
    while (hi + 1 < snaps.size() && snaps[hi].t < t_n) ++hi;
    const size_t lo = hi == 0 ? 0 : hi - 1;
    Field u_t = snaps[lo].u;
    if (hi != lo && snaps[hi].t > snaps[lo].t) {
        const double theta =
            std::clamp((t_n - snaps[lo].t) / (snaps[hi].t - snaps[lo].t), 0.0, 1.0);
        for (size_t i = 0; i < u_t.values.size(); ++i)
            u_t.values[i] =
                (1.0 - theta) * u_t.values[i] + theta * snaps[hi].u.values[i];
    }

    const PhiR phi = build_phi_R(R_n, N);
    SpectralField su = to_spectral(u_t);
    const int Mc = su.grid.M;

    BubbleExtract out;
    out.center = x_n;
    out.scale = R_n;
    out.time = t_n;
    out.gamma = gamma;
    out.N = N;
    out.line_field = Field(line, u_t.n);
    Field& vf = out.line_field;
    parallel_for(line.M, [&](int begin, int end) {
        for (int j = begin; j < end; ++j) {
            const double theta = x_n + phi(line.node(j));
            for (int c = 0; c < u_t.n; ++c) {
                double val = 0.0;
                for (int idx = 0; idx < Mc; ++idx) {
                    const double k = su.wavenumber(idx);
                    const std::complex<double>& a = su.coeffs[c][idx];
                    val += a.real() * std::cos(k * theta) - a.imag() * std::sin(k * theta);
                }
                vf.at(j, c) = val;
            }
        }
    });

    if (vf.max_sphere_defect() <= 1e-3) out.line_field = reproject(vf);
    out.bubble_energy = line_gagliardo_energy(out.line_field);
    out.residual_l2 = out.line_field.max_sphere_defect() <= 1e-6
                          ? bubble_residual(out.line_field, calib)
                          : std::numeric_limits<double>::quiet_NaN();
    return out;
}

int glue_restart_bound(double initial_energy, double eps0) {
    if (!(eps0 > 0.0))
        throw std::invalid_argument("glue_restart_bound: eps0 must be positive");
    return static_cast<int>(std::floor(initial_energy / eps0 + 1e-12));
}

FlowTrace glue_continue(const FlowTrace& trace, const FlowConfig& cfg) {
    if (trace.status != TerminalStatus::concentration_detected) return trace;
    if (trace.snapshots.empty() || trace.steps.empty())
        throw std::invalid_argument("glue_continue: trace is empty");

    const double E0 = trace.snapshots.front().energy;
    const int budget = glue_restart_bound(E0, cfg.thresholds.eps0);
    FlowTrace glued = trace;
    int restarts = 0;

    while (glued.status == TerminalStatus::concentration_detected) {
        const double t_halt = glued.steps.back().t;
        const double remaining = cfg.t_end - t_halt;
        if (remaining <= 1e-12 * cfg.t_end) break; // horizon already reached
        if (restarts + 1 > budget)
            throw std::runtime_error(
                "glue_continue: restart budget exhausted, floor(E(u0)/eps0) = " +
                std::to_string(budget));

        const FlowState& last = glued.snapshots.back();
        Field u_new = reproject(last.u);
        FlowConfig cont = cfg;
        cont.t_end = remaining;
        FlowTrace next = run_flow(u_new, cont);

        const double drop = last.energy - next.snapshots.front().energy;
        if (drop < -1e-8)
            throw std::logic_error("glue_continue: energy increased across the junction");
        glued.junction_times.push_back(t_halt);
        glued.junction_drops.push_back(drop);

        for (size_t i = 1; i < next.steps.size(); ++i) {
            TraceRow r = next.steps[i];
            r.t += t_halt;
            glued.steps.push_back(r);
        }
        for (size_t i = 1; i < next.snapshots.size(); ++i) {
            FlowState s = next.snapshots[i];
            s.t += t_halt;
            glued.snapshots.push_back(s);
        }
        glued.status = next.status;
        ++restarts;
    }
    return glued;
}

} // namespace halfflow
