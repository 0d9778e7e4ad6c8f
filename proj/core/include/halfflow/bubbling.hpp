#pragma once

#include <string>
#include <vector>

#include "halfflow/flow.hpp"

namespace halfflow {

// Pointwise |(-Lap)^{1/4} u|^2 via the |k|^{1/2} multiplier, applied
// as a circulant kernel so grid translations commute bit-exactly.
Field quarter_density(const Field& u);

// Local energy E_R(u; x0) = 1/2 integral of quarter_density over the
// chordal ball {x : |x - x0| <= R}, 0 < R < pi.
double local_energy(const Field& u, double x0, double R);

// E_R at every grid node for a precomputed quarter_density field.
// Window membership and summation order depend only on the node
// offset, so the profile commutes with grid rotations bit-exactly.
std::vector<double> local_energy_profile(const Field& qd, double R);

struct ConcentrationFlag {
    double t = 0.0;
    double x = 0.0;
    double radius = 0.0;
    double value = 0.0;
};

struct ConcentrationReport {
    std::vector<double> radii;
    std::vector<double> snapshot_times;
    // table[r][s*M + j]: E_{radii[r]} at snapshot s, node j.
    std::vector<std::vector<double>> table;
    std::vector<double> eps_of_R; // sup over (x, t) at each radius
    std::vector<ConcentrationFlag> flagged_points;
    double eps1 = 0.0;
    double struwe_ratio = 0.0; // evaluated at the middle radius
    double h1_ratio = 0.0;     // evaluated at the middle radius
};

// Tabulates E_R over snapshots x nodes x radii, records the running
// sup per radius and every (t, x) with E_R >= eps1.  struwe_ratio and
// h1_ratio are filled using the middle entry of radii.
ConcentrationReport concentration_scan(const FlowTrace& trace,
                                       const std::vector<double>& radii,
                                       double eps1 = 0.05);

// Measured constant for the improved L4 estimate:
//   LHS = int_t int_x |(-Lap)^{1/4}u|^4,
//   RHS = sup_{t,x} E_R * (int_t int_x |(-Lap)^{1/2}u|^2
//                          + R^{-2} int_t int_x |(-Lap)^{1/4}u|^2).
// Returns LHS/RHS; 0/0 -> 0, finite/0 -> +infinity.
double struwe_l4_report(const FlowTrace& trace, double R);

// Measured constant for the H1 space-time bound:
//   (int_t int_x |dx u|^2) / (E(u0) (1 + T/R^2)),  E(u0) = 0 -> 0.
double h1_bound_report(const FlowTrace& trace, double R);

struct Prop1Result {
    double local_energy = 0.0;
    double gagliardo = 0.0;
};

// Local energy at radius R next to the Gagliardo energy over the
// inflated ball B_{2^N R}(x0) paired with itself.  Requires 2^N R < pi.
Prop1Result prop1_check(const Field& u, double x0, double R, int N);

// Odd C^1 rescaling map: linear with slope R^2 on [-2^N/R, 2^N/R],
// then an arctan profile matched C^1 at the junction and approaching
// +-pi at infinity.  |phi'| <= R^2 everywhere.  Requires 2^N R < pi/2.
struct PhiR {
    double R = 0.0;
    int N = 0;
    double a = 0.0;     // linear-zone half width 2^N / R
    double b = 0.0;     // phi(a) = 2^N R
    double kappa = 0.0; // arctan rate fixed by the C^1 junction match
    double operator()(double x) const;
};

PhiR build_phi_R(double R, int N);

struct BubbleExtract {
    double center = 0.0; // x_n
    double scale = 0.0;  // R_n
    double time = 0.0;   // t_n
    double gamma = 0.0;  // validated look-back in rescaled units
    int N = 0;
    std::string profile = "arctan"; // junction profile of phi_R, for reports
    Field line_field;               // rescaled sample on the LineGrid
    double residual_l2 = 0.0;
    double bubble_energy = 0.0; // raw line Gagliardo energy over [-L,L]^2
};

// Samples u_n(0, x) = u(t_n, x_n + phi_{R_n}(x)) on the line grid,
// interpolating linearly in time between snapshots and evaluating the
// interpolated field spectrally in space.  Requires the look-back
// window [t_n - gamma R_n^2, t_n] to lie inside the trace.  The sample
// is renormalized to the sphere when its drift is <= 1e-3 (linear
// time interpolation leaves the sphere at second order).
BubbleExtract rescale_extract(const FlowTrace& trace, double t_n, double x_n,
                              double R_n, double gamma, const LineGrid& line,
                              int N, const CalibrationRecord& calib);

// Raw Gagliardo double integral over [-L,L]^2 on the line grid,
// mid-node offsets against node values (matches gagliardo_local's
// convention on the circle).
double line_gagliardo_energy(const Field& v);

// L2 norm over the inner half [-L/2, L/2] of
//   C_pv * PV(v) - lambda_nl * v |d_{1/2} v|^2,
// with the principal value over [-L, L] by mid-node quadrature and
// analytic tails that freeze v at its boundary values beyond the grid.
// Rejects fields further than 1e-6 from the sphere.
double bubble_residual(const Field& v, const CalibrationRecord& calib);

// Continue a concentration-halted trace: reproject the final snapshot,
// restart run_flow for the remaining time, concatenate.  The restart
// budget is floor(E(u0)/eps0); exceeding it throws.  Junction times
// and energy drops are recorded on the returned trace, and a negative
// drop beyond quadrature noise (-1e-8) is rejected.
FlowTrace glue_continue(const FlowTrace& trace, const FlowConfig& cfg);

// Restart budget floor(E0/eps0) used by glue_continue.
int glue_restart_bound(double initial_energy, double eps0);

} // namespace halfflow
