#pragma once

#include <limits>
#include <vector>

#include "halfflow/calculus.hpp"
#include "halfflow/field.hpp"

namespace halfflow {

// Space-time sample on a uniform time grid t_m = m dt, m = 0..steps().
// slices[0] is the prescribed initial trace and is never modified by
// the optimizer.
struct SpaceTimeField {
    CircleGrid grid;
    int n = 0;
    double dt = 0.0;
    std::vector<Field> slices;

    int steps() const { return static_cast<int>(slices.size()) - 1; }
    double t_max() const { return dt * steps(); }
    double time(int m) const { return dt * m; }
};

// Constant-in-time extension of u0 (the static competitor).
SpaceTimeField static_space_time(const Field& u0, double dt, int time_steps);

// Exponentially weighted space-time energy
//   sum_m K_m eps ||(u_{m+1}-u_m)/dt||^2 + sum_m W_m S_{s,p}(u_m),
//   S_{s,p}(u) = C_half (2/p) sum_pairs (h^2/d) |u(x)-u(y)|^p / d^{sp},
// with K_m the exact integral of e^{-t/eps} over [t_m, t_{m+1}] and
// W_m the exact integral of e^{-t/eps} against the hat function at
// t_m.  The exact weights make the discrete Euler-Lagrange equations
// of this sum match the centered residual operator to second order in
// dt/eps.  The C_half factor normalizes the p = 2 spatial term to
// twice the spectral half-energy, so the EL operator carries a unit
// coefficient on the half-Laplacian, consistent with the flow.
// Requires p >= 2 and t_max() >= 10 eps.
double energy_eps(const SpaceTimeField& U, double eps, double s, double p);

struct EnergyBreakdown {
    double total = 0.0;
    double kinetic = 0.0;
    double spatial = 0.0;
    // Analytic bound on the neglected tail: eps e^{-T/eps} times the
    // spatial energy of the final slice (the tail of the frozen field).
    double tail_bound = 0.0;
};
EnergyBreakdown energy_eps_report(const SpaceTimeField& U, double eps, double s,
                                  double p);

struct MinimizeReport {
    std::vector<double> energies; // accepted energy after each iteration
    int iterations = 0;
    bool converged = false; // relative decrease fell below 1e-8
    bool stalled = false;   // backtracking exhausted without descent
    double final_energy = 0.0;
    double initial_energy = 0.0;
};

// Projected gradient descent on the interior and terminal time slices
// with the initial slice pinned, pointwise renormalization to the
// sphere after every step, and backtracking (halving) line search.
// The time grid is t_max = 10 eps split into time_steps intervals.
// For (s, p) = (1/2, 2) the descent direction is preconditioned by
// the exact tridiagonal factorization of the quadratic part of the
// energy per spatial mode; plain quadrature gradients otherwise.
// Requires s = 1/2 (energy_eps alone supports general s) and p >= 2.
// Stops at `iters` iterations or when the relative energy decrease
// drops below 1e-8; a backtracking stall is reported, not thrown.
SpaceTimeField minimize(const Field& u0, double eps, double s, double p, int iters,
                        int time_steps = 64, MinimizeReport* report = nullptr);

// Space-time L2 norm of the tangential part of
//   -eps D2_t u + D1_t u + C_half div(d_{1/2} u)
// over interior slices, with centered time differences.
double el_residual(const SpaceTimeField& U, double eps);

struct IREDiagnostics {
    std::vector<double> t;
    std::vector<double> I; // ||dt v||_{L2}^2, centered differences
    std::vector<double> R; // eps * C_half-normalized spatial energy
    std::vector<double> E; // e^t int_t^inf e^{-s}(I+R) ds, backward recursion
};

// Expects V in the rescaled frame v(t, x) = u(eps t, x) (see
// time_rescale).  E is accumulated backward with exact segment
// weights for e^{-s} against piecewise-linear I+R, with the tail
// beyond t_max frozen at the final value.
IREDiagnostics diagnostics_ire(const SpaceTimeField& V, double eps);

// max over interior nodes of |dE/dt + 2 I| / (max I + 1e-12) in the
// v-frame; small only for converged minimizers.  U is in the u-frame
// as returned by minimize.
double monotonicity_check(const SpaceTimeField& U, double eps);

enum class RescaleDirection { to_v, to_u };

// v(t, x) = u(eps t, x): relabels the time axis (dt / eps or dt * eps),
// slice values unchanged, so the energies match to round-off:
// energy_eps on the u-frame equals j_energy on the v-frame.
SpaceTimeField time_rescale(const SpaceTimeField& U, double eps, RescaleDirection dir);

// v-frame functional: sum_m K'_m ||(v_{m+1}-v_m)/dt||^2 + sum_m W'_m
// eps S(v_m) with unit decay weight e^{-t}.
double j_energy(const SpaceTimeField& V, double eps, double s = 0.5, double p = 2.0);

struct SweepRow {
    double eps = 0.0;
    double dtv_sq = 0.0; // int ||dt v||^2 dx dt over the v-frame grid, unweighted
    // int_t^{t+1} of the C_half-normalized spatial energy in the
    // u-frame, unit windows truncated to t_max.
    std::vector<double> window_integrals;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
    bool slope_defined = false; // false when all dtv_sq vanish (constant data)
};

// Minimize at every eps and fit the log-log slope of dtv_sq vs eps.
SweepTable epsilon_sweep(const Field& u0, const std::vector<double>& eps_list,
                         int iters = 4000);

} // namespace halfflow
