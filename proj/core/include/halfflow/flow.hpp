#pragma once

#include <optional>
#include <vector>

#include "halfflow/calculus.hpp"
#include "halfflow/field.hpp"

namespace halfflow {

enum class TerminalStatus { completed, concentration_detected, diverged };

const char* to_string(TerminalStatus s);

struct FlowConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int picard_max_iters = 40;
    double picard_tol = 1e-8;
    bool reproject = true;
    double slab_length = 0.1; // used by the Picard mode
    ThresholdConfig thresholds;
    std::vector<double> scan_radii; // empty disables the concentration halt
    int snapshot_stride = 10;
    bool use_picard = false;
    bool nonlinearity = true; // off gives the pure linear semigroup
    std::optional<CalibrationRecord> calibration;
};

struct FlowState {
    double t = 0.0;
    Field u;
    double energy = 0.0;       // half_energy(u)
    double dtu_l2 = 0.0;       // backward-difference L2 estimate, 0 at t = 0
    double sphere_drift = 0.0; // max_j | |u(x_j)| - 1 |
};

// One row per time step, matching the emitted trace schema.
struct TraceRow {
    double t = 0.0;
    double energy = 0.0;
    double dtu_l2 = 0.0;
    double sphere_drift = 0.0;
    double max_u = 0.0;
};

struct FlowTrace {
    std::vector<FlowState> snapshots; // stride-sampled, first and last always kept
    std::vector<TraceRow> steps;      // every accepted step, strictly increasing t
    TerminalStatus status = TerminalStatus::completed;
    // Filled by glue_continue: restart times and the energy drop across
    // each junction (previous terminal energy minus restart energy).
    std::vector<double> junction_times;
    std::vector<double> junction_drops;
};

// Calibrated nonlinearity u(x) |d_{1/2}u|^2(x).  At the calibrated
// scale the degree-one circle map satisfies rhs(u) = frac_laplacian(u, 1/2),
// so it is a stationary point of the flow.  The caller certifies that
// u lies on the sphere; off-sphere input is not rejected because the
// Picard iteration evaluates this on unprojected iterates.
Field rhs(const Field& u, const CalibrationRecord& calib);

// Exponential-Euler stepping machinery with the linear part applied
// through precomputed circulant kernels,
//   u+ = K1 * u + dt K2 * rhs(u),   K1 = e^{-dt|k|}, K2 = phi1(-dt|k|),
// phi1(z) = (e^z - 1)/z.  Kernels are applied by relative-offset
// summation, so grid translations commute with step() bit-exactly.
struct FlowStepper {
    CircleGrid grid;
    double dt = 0.0;
    CalibrationRecord calib;
    bool nonlinearity = true;
    std::vector<double> K1, K2;

    FlowStepper(const CircleGrid& g, double dt, const CalibrationRecord& calib,
                bool nonlinearity = true);

    Field step(const Field& u) const; // no reprojection
    Field step_with_source(const Field& u, const Field& source) const;
};

// Single step convenience wrapper; reprojects afterwards when asked.
Field exp_euler_step(const Field& u, double dt, const CalibrationRecord& calib,
                     bool reproject_after = true, bool nonlinearity = true);

struct PicardResult {
    std::vector<Field> trajectory; // slab nodes 0..S, trajectory[0] = u0
    std::vector<double> times;
    std::vector<double> diffs;  // sup-over-slab H1 distance between sweeps
    std::vector<double> ratios; // diffs[r] / diffs[r-1]
    bool converged = false;
    int iterations = 0;
};

// Fixed-point slab solver: sweep r+1 solves the linear equation
// dt v + (-Lap)^{1/2} v = rhs(v^r) with v(0) = u0 by exponential
// integration, starting from the constant-in-time trajectory.  Stops
// when the sup-over-slab H1 distance between sweeps drops below
// cfg.picard_tol.  converged = false after cfg.picard_max_iters
// signals that T_slab is too large for contraction.
PicardResult picard_slab(const Field& u0, double T_slab, const FlowConfig& cfg);

// Advance u0 to cfg.t_end, recording a TraceRow per step and a
// snapshot every cfg.snapshot_stride steps.  Halts early with status
// concentration_detected when the running sup of the local energy
// profile reaches thresholds.eps1 for every radius in scan_radii
// (checked at snapshot times), or diverged on non-finite values,
// max|u| > 10, or a >10% single-step energy increase.
FlowTrace run_flow(const Field& u0, const FlowConfig& cfg);

// | sum_snapshots ||dt u||^2 dt + E(T) - E(0) | with the time
// derivative by centered differences on snapshots (one-sided at the
// ends) and trapezoid weights in time.
double energy_identity_residual(const FlowTrace& trace);

// Closed-form dissipation of the linear semigroup e^{-t(-Lap)^{1/2}}:
//   E(0) - E(T) = pi sum_k |k| |hat(u0)(k)|^2 (1 - e^{-2|k|T}).
double linear_dissipation(const Field& u0, double T);

} // namespace halfflow
