#include "halfflow/variational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "halfflow/fft.hpp"
#include "halfflow/offdiag.hpp"
#include "halfflow/parallel.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double C_half_analytic = 1.0 / (2.0 * pi); // reproduced by calibrate()
constexpr double rel_stop = 1e-8;

// Exact integrals of e^{-t/lambda} over the time grid: K[m] over the
// interval [t_m, t_{m+1}] and W[m] against the hat function at t_m.
struct TimeWeights {
    std::vector<double> K; // size steps
    std::vector<double> W; // size steps + 1
};

TimeWeights exact_weights(double dt, int steps, double lambda) {
    TimeWeights tw;
    tw.K.resize(steps);
    tw.W.resize(steps + 1);
    const double r = dt / lambda;
    for (int m = 0; m < steps; ++m)
        tw.K[m] = lambda * std::exp(-m * r) * -std::expm1(-r);

    const double beta = 0.5 * r;
    const double sb = std::sinh(beta) / beta;
    for (int m = 1; m < steps; ++m) tw.W[m] = dt * std::exp(-m * r) * sb * sb;
    // Half hats at the ends: int e^{-t/l} (1 -+ t/dt) over one interval.
    const double em = std::exp(-r);
    const double rise = (1.0 - (1.0 + r) * em) / r; // (1/dt) int_0^dt (t/l) ... in units of lambda
    tw.W[0] = lambda * (-std::expm1(-r) - rise);
    // Same rising integral as W[0], anchored one interval to the left:
    // W[steps] = e^{-(steps-1) r} * lambda * rise = e^{-steps r} * lambda * e^r * rise.
    const double rise_up = (std::expm1(r) - r) / r;
    tw.W[steps] = lambda * std::exp(-steps * r) * rise_up;
    return tw;
}

// C_half (2/p) sum_pairs (h^2/d) |u(x)-u(y)|^p / d^{sp} by streaming
// over offsets, per-row partials reduced in index order.
double spatial_pair_energy(const Field& u, const HalfOffsetWorkspace& ws,
                           const Field& u_half, double s, double p) {
    const CircleGrid& g = u.circle();
    const int M = g.M;
    const double h = g.h();
    std::vector<double> wp(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m)
        wp[m] = h * h / std::pow(ws.dist[m], 1.0 + s * p);

    std::vector<double> rows(static_cast<size_t>(M), 0.0);
    parallel_for(M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double acc = 0.0;
            for (int m = 0; m < M; ++m) {
                const int im = i + m < M ? i + m : i + m - M;
                double sq = 0.0;
                for (int c = 0; c < u.n; ++c) {
                    const double d = u.at(i, c) - u_half.at(im, c);
                    sq += d * d;
                }
                acc += wp[m] * (p == 2.0 ? sq : std::pow(sq, 0.5 * p));
            }
            rows[i] = acc;
        }
    });
    double total = 0.0;
    for (int i = 0; i < M; ++i) total += rows[i];
    return C_half_analytic * (2.0 / p) * total;
}

double spatial_pair_energy(const Field& u, double s, double p) {
    HalfOffsetWorkspace ws(u.circle());
    Field uh = apply_circulant(u, ws.half_shift);
    return spatial_pair_energy(u, ws, uh, s, p);
}

double kinetic_term(const SpaceTimeField& U, const std::vector<double>& K,
                    double coeff) {
    double acc = 0.0;
    const double inv_dt2 = 1.0 / (U.dt * U.dt);
    for (int m = 0; m < U.steps(); ++m) {
        const double d = l2_distance(U.slices[m + 1], U.slices[m]);
        acc += K[m] * coeff * d * d * inv_dt2;
    }
    return acc;
}

void validate_exponents(double s, double p, const char* who) {
    if (!(p >= 2.0))
        throw std::invalid_argument(std::string(who) + ": requires p >= 2");
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument(std::string(who) + ": requires s in (0, 1)");
}

EnergyBreakdown weighted_energy(const SpaceTimeField& U, double lambda,
                                double kin_coeff, double spat_coeff, double s,
                                double p) {
    const TimeWeights tw = exact_weights(U.dt, U.steps(), lambda);
    EnergyBreakdown out;
    out.kinetic = kinetic_term(U, tw.K, kin_coeff);
    HalfOffsetWorkspace ws(U.grid);
    double spat_last = 0.0;
    for (int m = 0; m <= U.steps(); ++m) {
        Field uh = apply_circulant(U.slices[m], ws.half_shift);
        spat_last = spatial_pair_energy(U.slices[m], ws, uh, s, p);
        out.spatial += tw.W[m] * spat_coeff * spat_last;
    }
    out.tail_bound =
        lambda * std::exp(-U.t_max() / lambda) * spat_coeff * spat_last;
    out.total = out.kinetic + out.spatial;
    return out;
}

// Spectral spatial energy 2 pi sum |k| |hat u|^2 for the fast p = 2
// path; equals the pair quadrature to round-off on band-limited data.
double spatial_spectral(const std::vector<std::vector<std::complex<double>>>& su,
                        int M) {
    double acc = 0.0;
    for (const auto& comp : su)
        for (int i = 0; i < M; ++i)
            acc += std::abs(static_cast<double>(index_to_wavenumber(i, M))) *
                   std::norm(comp[i]);
    return 2.0 * pi * acc;
}

std::vector<std::vector<std::complex<double>>> slice_spectrum(const Field& u) {
    const int M = u.circle().M;
    std::vector<std::vector<std::complex<double>>> su(
        u.n, std::vector<std::complex<double>>(M));
    std::vector<std::complex<double>> buf(M);
    for (int c = 0; c < u.n; ++c) {
        for (int j = 0; j < M; ++j) buf[j] = u.at(j, c);
        su[c] = forward_dft(buf);
    }
    return su;
}

bool renormalize_into(const Field& base, const Field& dir, double alpha, Field& out) {
    for (int j = 0; j < base.size(); ++j) {
        double sq = 0.0;
        for (int c = 0; c < base.n; ++c) {
            const double v = base.at(j, c) - alpha * dir.at(j, c);
            out.at(j, c) = v;
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm <= 1e-6) return false;
        for (int c = 0; c < base.n; ++c) out.at(j, c) /= norm;
    }
    return true;
}

} // namespace

SpaceTimeField static_space_time(const Field& u0, double dt, int time_steps) {
    if (!(dt > 0.0) || time_steps < 2)
        throw std::invalid_argument("static_space_time: needs dt > 0 and >= 2 steps");
    SpaceTimeField U;
    U.grid = u0.circle();
    U.n = u0.n;
    U.dt = dt;
    U.slices.assign(static_cast<size_t>(time_steps) + 1, u0);
    return U;
}

double energy_eps(const SpaceTimeField& U, double eps, double s, double p) {
    return energy_eps_report(U, eps, s, p).total;
}

EnergyBreakdown energy_eps_report(const SpaceTimeField& U, double eps, double s,
                                  double p) {
    validate_exponents(s, p, "energy_eps");
    if (!(eps > 0.0)) throw std::invalid_argument("energy_eps: eps must be positive");
    if (U.t_max() < 10.0 * eps * (1.0 - 1e-12))
        throw std::invalid_argument("energy_eps: horizon must cover 10 eps");
    return weighted_energy(U, eps, eps, 1.0, s, p);
}

double j_energy(const SpaceTimeField& V, double eps, double s, double p) {
    validate_exponents(s, p, "j_energy");
    return weighted_energy(V, 1.0, 1.0, eps, s, p).total;
}

SpaceTimeField time_rescale(const SpaceTimeField& U, double eps, RescaleDirection dir) {
    if (!(eps > 0.0)) throw std::invalid_argument("time_rescale: eps must be positive");
    SpaceTimeField out = U;
    out.dt = dir == RescaleDirection::to_v ? U.dt / eps : U.dt * eps;
    return out;
}

SpaceTimeField minimize(const Field& u0, double eps, double s, double p, int iters,
                        int time_steps, MinimizeReport* report) {
    validate_exponents(s, p, "minimize");
    if (std::abs(s - 0.5) > 1e-12)
        throw std::invalid_argument("minimize: only s = 1/2 is supported");
    if (!(eps > 0.0)) throw std::invalid_argument("minimize: eps must be positive");
    if (u0.max_sphere_defect() > 1e-6)
        throw std::invalid_argument("minimize: initial data is not on the sphere");

    const int Mt = std::max(2, time_steps);
    const double dt = 10.0 * eps / Mt;
    SpaceTimeField U = static_space_time(u0, dt, Mt);
    const CircleGrid& g = U.grid;
    const int M = g.M;
    const TimeWeights tw = exact_weights(dt, Mt, eps);
    const double kin = 2.0 * eps / (dt * dt);
    const bool fast = p == 2.0;

    HalfOffsetWorkspace ws(g);
    const auto energy_of = [&](const SpaceTimeField& V) {
        double e = kinetic_term(V, tw.K, eps);
        if (fast) {
            for (int m = 0; m <= Mt; ++m)
                e += tw.W[m] * spatial_spectral(slice_spectrum(V.slices[m]), M);
        } else {
            for (int m = 0; m <= Mt; ++m) {
                Field uh = apply_circulant(V.slices[m], ws.half_shift);
                e += tw.W[m] * spatial_pair_energy(V.slices[m], ws, uh, s, p);
            }
        }
        return e;
    };

    // Newton preconditioner for the fast path: per spatial mode the
    // quadratic part of the energy is tridiagonal across time slices
    // (rows m = 1..Mt); factor once per |k|.
    const int n_abs = M / 2 + 1;
    std::vector<std::vector<double>> fac_diag(n_abs), fac_w(n_abs);
    std::vector<double> offd(static_cast<size_t>(Mt)); // off(m, m+1), m = 1..Mt-1
    if (fast) {
        for (int m = 1; m < Mt; ++m) offd[m] = -kin * tw.K[m];
        for (int ak = 0; ak < n_abs; ++ak) {
            std::vector<double> diag(static_cast<size_t>(Mt) + 1);
            for (int m = 1; m <= Mt; ++m) {
                diag[m] = kin * (tw.K[m - 1] + (m < Mt ? tw.K[m] : 0.0)) +
                          2.0 * tw.W[m] * ak;
            }
            auto& fd = fac_diag[ak];
            auto& fw = fac_w[ak];
            fd.assign(static_cast<size_t>(Mt) + 1, 0.0);
            fw.assign(static_cast<size_t>(Mt) + 1, 0.0);
            fd[1] = diag[1];
            for (int m = 2; m <= Mt; ++m) {
                fw[m] = offd[m - 1] / fd[m - 1];
                fd[m] = diag[m] - fw[m] * offd[m - 1];
            }
        }
    }

    double energy = energy_of(U);
    if (report) {
        *report = MinimizeReport{};
        report->initial_energy = energy;
    }

    std::vector<Field> direction(static_cast<size_t>(Mt) + 1, Field(g, U.n));
    SpaceTimeField trial = U;
    double alpha = 1.0;
    bool stalled = false;
    int it = 0;
    for (; it < iters; ++it) {
        // Raw gradient on the free slices.
        if (fast) {
            std::vector<std::vector<std::vector<std::complex<double>>>> su(
                static_cast<size_t>(Mt) + 1);
            for (int m = 0; m <= Mt; ++m) su[m] = slice_spectrum(U.slices[m]);
            std::vector<std::complex<double>> rhs(static_cast<size_t>(Mt) + 1), buf(M);
            for (int c = 0; c < U.n; ++c) {
                for (int idx = 0; idx < M; ++idx) {
                    const int ak = std::abs(index_to_wavenumber(idx, M));
                    const auto& fd = fac_diag[ak];
                    const auto& fw = fac_w[ak];
                    for (int m = 1; m <= Mt; ++m) {
                        std::complex<double> gk =
                            kin * (tw.K[m - 1] * (su[m][c][idx] - su[m - 1][c][idx]));
                        if (m < Mt)
                            gk -= kin * tw.K[m] * (su[m + 1][c][idx] - su[m][c][idx]);
                        gk += 2.0 * tw.W[m] * ak * su[m][c][idx];
                        rhs[m] = gk;
                    }
                    for (int m = 2; m <= Mt; ++m) rhs[m] -= fw[m] * rhs[m - 1];
                    rhs[Mt] /= fd[Mt];
                    for (int m = Mt - 1; m >= 1; --m)
                        rhs[m] = (rhs[m] - offd[m] * rhs[m + 1]) / fd[m];
                    // Scatter the per-mode Newton direction back.
                    for (int m = 1; m <= Mt; ++m) su[m][c][idx] = rhs[m];
                }
                for (int m = 1; m <= Mt; ++m) {
                    buf = backward_dft(su[m][c]);
                    for (int j = 0; j < M; ++j) direction[m].at(j, c) = buf[j].real();
                }
            }
        } else {
            for (int m = 1; m <= Mt; ++m) {
                Field grad(g, U.n);
                const Field& um = U.slices[m];
                for (size_t i = 0; i < grad.values.size(); ++i) {
                    double v = kin * tw.K[m - 1] *
                               (um.values[i] - U.slices[m - 1].values[i]);
                    if (m < Mt)
                        v -= kin * tw.K[m] *
                             (U.slices[m + 1].values[i] - um.values[i]);
                    grad.values[i] = v;
                }
                OffDiagKernel F = d_s(um, 0.5);
                if (p != 2.0) {
                    for (int i = 0; i < M; ++i)
                        for (int mm = 0; mm < M; ++mm) {
                            double sq = 0.0;
                            for (int c = 0; c < U.n; ++c)
                                sq += F.at(c, i, mm) * F.at(c, i, mm);
                            const double scale = std::pow(sq, 0.5 * p - 1.0);
                            for (int c = 0; c < U.n; ++c) F.at(c, i, mm) *= scale;
                        }
                }
                Field div = div_field(F);
                const double cs = 2.0 * C_half_analytic * tw.W[m];
                for (size_t i = 0; i < grad.values.size(); ++i)
                    grad.values[i] += cs * div.values[i];
                // Functional normalization by the slice mass.
                for (size_t i = 0; i < grad.values.size(); ++i)
                    grad.values[i] /= tw.W[m];
                direction[m] = std::move(grad);
            }
        }

        double dir_max = 0.0;
        for (int m = 1; m <= Mt; ++m) dir_max = std::max(dir_max, direction[m].max_norm());
        if (dir_max <= 1e-12) {
            if (report) report->converged = true;
            break;
        }

        // Backtracking: halve alpha until the renormalized step descends.
        alpha = std::min(alpha * 2.0, 1.0);
        bool accepted = false;
        double new_energy = energy;
        while (alpha > 1e-14) {
            bool feasible = true;
            for (int m = 1; m <= Mt && feasible; ++m)
                feasible = renormalize_into(U.slices[m], direction[m], alpha,
                                            trial.slices[m]);
            if (feasible) {
                new_energy = energy_of(trial);
                if (new_energy < energy) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        for (int m = 1; m <= Mt; ++m) std::swap(U.slices[m], trial.slices[m]);
        const double drop = energy - new_energy;
        energy = new_energy;
        if (report) report->energies.push_back(energy);
        if (drop <= rel_stop * std::max(energy, 1e-300)) {
            ++it;
            if (report) report->converged = true;
            break;
        }
    }

    if (report) {
        report->iterations = it;
        report->stalled = stalled;
        report->final_energy = energy;
        if (!report->converged && !stalled && energy == 0.0) report->converged = true;
    }
    return U;
}

double el_residual(const SpaceTimeField& U, double eps) {
    if (U.steps() < 2)
        throw std::invalid_argument("el_residual: need at least two time steps");
    const CircleGrid& g = U.grid;
    const double dt = U.dt;
    const double h = g.h();

    double total = 0.0;
    for (int m = 1; m < U.steps(); ++m) {
        const Field& um = U.slices[m];
        Field div = div_field(d_s(um, 0.5));
        double slice = 0.0;
        for (int j = 0; j < g.M; ++j) {
            double rdot_u = 0.0, usq = 0.0;
            std::vector<double> r(static_cast<size_t>(U.n));
            for (int c = 0; c < U.n; ++c) {
                const double d2 = (U.slices[m + 1].at(j, c) - 2.0 * um.at(j, c) +
                                   U.slices[m - 1].at(j, c)) /
                                  (dt * dt);
                const double d1 =
                    (U.slices[m + 1].at(j, c) - U.slices[m - 1].at(j, c)) / (2.0 * dt);
                r[c] = -eps * d2 + d1 + C_half_analytic * div.at(j, c);
                rdot_u += r[c] * um.at(j, c);
                usq += um.at(j, c) * um.at(j, c);
            }
            for (int c = 0; c < U.n; ++c) {
                const double tang = r[c] - rdot_u * um.at(j, c) / usq;
                slice += tang * tang;
            }
        }
        total += dt * h * slice;
    }
    return std::sqrt(total);
}

IREDiagnostics diagnostics_ire(const SpaceTimeField& V, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("diagnostics_ire: eps must be positive");
    const int Mt = V.steps();
    if (Mt < 2) throw std::invalid_argument("diagnostics_ire: need at least two steps");
    const double dt = V.dt;

    IREDiagnostics d;
    d.t.resize(Mt + 1);
    d.I.resize(Mt + 1);
    d.R.resize(Mt + 1);
    d.E.assign(Mt + 1, 0.0);
    HalfOffsetWorkspace ws(V.grid);
    for (int m = 0; m <= Mt; ++m) {
        d.t[m] = V.time(m);
        const int lo = m == 0 ? 0 : m - 1;
        const int hi = m == Mt ? Mt : m + 1;
        const double dist = l2_distance(V.slices[hi], V.slices[lo]) / ((hi - lo) * dt);
        d.I[m] = dist * dist;
        Field vh = apply_circulant(V.slices[m], ws.half_shift);
        d.R[m] = eps * spatial_pair_energy(V.slices[m], ws, vh, 0.5, 2.0);
    }

    // E(t) = e^t int_t^inf e^{-s}(I+R) ds, integrated segment by
    // segment with exact weights for a piecewise-linear integrand and
    // the tail frozen at the final value.
    const double em = std::exp(-dt);
    const double B = (1.0 - (1.0 + dt) * em) / dt;
    const double A = -std::expm1(-dt) - B;
    d.E[Mt] = d.I[Mt] + d.R[Mt];
    for (int m = Mt - 1; m >= 0; --m) {
        const double f0 = d.I[m] + d.R[m];
        const double f1 = d.I[m + 1] + d.R[m + 1];
        d.E[m] = A * f0 + B * f1 + em * d.E[m + 1];
    }
    return d;
}

double monotonicity_check(const SpaceTimeField& U, double eps) {
    const SpaceTimeField V = time_rescale(U, eps, RescaleDirection::to_v);
    const IREDiagnostics d = diagnostics_ire(V, eps);
    const int Mt = V.steps();
    double max_I = 0.0;
    for (double v : d.I) max_I = std::max(max_I, v);
    double worst = 0.0;
    for (int m = 1; m + 1 < Mt; ++m) {
        const double dE = (d.E[m + 1] - d.E[m]) / V.dt;
        const double mid_I = 0.5 * (d.I[m] + d.I[m + 1]);
        worst = std::max(worst, std::abs(dE + 2.0 * mid_I));
    }
    return worst / (max_I + 1e-12);
}

SweepTable epsilon_sweep(const Field& u0, const std::vector<double>& eps_list,
                         int iters) {
    if (eps_list.size() < 4)
        throw std::invalid_argument("epsilon_sweep: need at least four eps values");
    SweepTable table;
    for (double eps : eps_list) {
        MinimizeReport rep;
        SpaceTimeField U = minimize(u0, eps, 0.5, 2.0, iters, 64, &rep);

        SweepRow row;
        row.eps = eps;
        // v-frame kinetic integral: forward differences, unweighted.
        const double dtv = U.dt / eps;
        for (int m = 0; m < U.steps(); ++m) {
            const double diff = l2_distance(U.slices[m + 1], U.slices[m]) / dtv;
            row.dtv_sq += dtv * diff * diff;
        }

        // Unit windows of the spatial energy in the u-frame, truncated
        // to the horizon; piecewise-linear in t between slices.
        std::vector<double> S(static_cast<size_t>(U.steps()) + 1);
        HalfOffsetWorkspace ws(U.grid);
        for (int m = 0; m <= U.steps(); ++m) {
            Field uh = apply_circulant(U.slices[m], ws.half_shift);
            S[m] = spatial_pair_energy(U.slices[m], ws, uh, 0.5, 2.0);
        }
        const double T = U.t_max();
        for (double w0 = 0.0; w0 < T - 1e-12; w0 += 1.0) {
            const double w1 = std::min(w0 + 1.0, T);
            double acc = 0.0;
            for (int m = 0; m < U.steps(); ++m) {
                const double a = std::max(w0, U.time(m));
                const double b = std::min(w1, U.time(m + 1));
                if (b <= a) continue;
                const auto lin = [&](double t) {
                    const double th = (t - U.time(m)) / U.dt;
                    return (1.0 - th) * S[m] + th * S[m + 1];
                };
                acc += 0.5 * (lin(a) + lin(b)) * (b - a);
            }
            row.window_integrals.push_back(acc);
        }
        table.rows.push_back(std::move(row));
    }

    // Log-log slope over the rows with nonvanishing kinetic integral.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const SweepRow& row : table.rows) {
        if (!(row.dtv_sq > 0.0)) continue;
        const double x = std::log(row.eps);
        const double y = std::log(row.dtv_sq);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        if (denom != 0.0) {
            table.slope = (count * sxy - sx * sy) / denom;
            table.slope_defined = true;
        }
    }
    return table;
}

} // namespace halfflow
