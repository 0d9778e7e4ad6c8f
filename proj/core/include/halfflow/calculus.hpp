#pragma once

#include <vector>

#include "halfflow/offdiag.hpp"

namespace halfflow {

// Concentration and solver thresholds shared across modules.
struct ThresholdConfig {
    double eps1 = 0.05;       // concentration detection level
    double eps0 = 0.5;        // gluing energy-drop quantum
    double sphere_tol = 1e-8; // admissible sphere defect
    double picard_tol = 1e-8; // fixed-point convergence level
    double quad_tol = 1e-3;   // interpolation / quadrature slack
};

// Measured normalization constants tying the pair quadratures to the
// spectral operators on a given grid:
//   C_half: <(-Delta)^{1/2} f, g> = C_half * frac_div_pair(d_{1/2} f, g)
//   C_pv:   frac_laplacian(., 1/2) = C_pv * raw half-offset PV sum
//   nonlinearity_factor: scale that makes the degree-one circle map a
//     fixed point of the flow: frac_laplacian(u,1/2) = factor * u |d_{1/2}u|^2.
// All three are least-squares fits over the modes k = 1 .. M/8; the
// relative fit residuals are recorded and a residual above 5% is a
// calibration failure.
struct CalibrationRecord {
    int M = 0;
    double C_half = 0.0;
    double C_pv = 0.0;
    double nonlinearity_factor = 0.0;
    double residual_half = 0.0;
    double residual_pv = 0.0;
    double residual_nonlinearity = 0.0;
};

CalibrationRecord calibrate(const CircleGrid& g);

// Current kernel u_i(x) d_{1/2}u_j(x,y) - u_j(x) d_{1/2}u_i(x,y).
// Antisymmetric in (x,y) exactly; divergence-free when u solves the
// calibrated half-harmonic map equation.  Sets sphere_warning on the
// result if u leaves the sphere by more than thresholds.sphere_tol.
OffDiagKernel shatah_current(const Field& u, int i, int j,
                             const ThresholdConfig& thresholds = {});

// Zero-mean solution of (-Delta)^{1/2} psi = g: hat(psi)(k) = hat(g)(k)/|k|.
// The removed mean of g (one value per component) is reported through
// removed_mean when non-null.
Field solve_half_poisson(const Field& g, std::vector<double>* removed_mean = nullptr);

// Divergence-free correction: zero the pairs with separation < delta,
// then subtract d_{1/2} h with (-Delta)^{1/2} h = div_{1/2} Omega_delta.
// The result pairs to zero against every mode below Nyquist.
struct DivfreeCorrection {
    OffDiagKernel corrected;
    Field h_delta;              // potential, one component per kernel component
    double h_half_norm = 0.0;   // ||h||_{H^{1/2}-homogeneous}
    double cutoff_distance = 0.0;
};
DivfreeCorrection divfree_correction(const OffDiagKernel& Omega, double delta,
                                     const CalibrationRecord& calib);

// Trilinear remainder
//   T^i(u,v,w)(x) = (1/2) sum_k \int d_{1/2}u_i . d_{1/4}v_k . d_{1/4}w_k dy/|x-y|.
// Streams over pairs; fields must share grid and component count.
Field remainder_T(const Field& u, const Field& v, const Field& w);

// Compensation ratio
//   ||pairing(F, d_{1/2} g)||_{H^{-1/2}} / (||F||_{L2_od} ||g||_{H^{1/2}-hom}).
// Requires F divergence-free: pairings against the first M/8 modes must
// be below 1e-6 relative to ||F||_{L2_od}, otherwise the check throws.
double wente_check(const OffDiagKernel& F, const Field& g);

// Localized Gagliardo energy sum over pairs with x in arc A and y in
// arc B of |u(x)-u(y)|^2 / |x-y|^2 (weight h^2).  Arcs are (center,
// radius) in chordal distance; radius >= 2 covers the whole circle.
struct Arc {
    double center = 0.0;
    double radius = 0.0;
};
double gagliardo_local(const Field& u, const Arc& A, const Arc& B);

} // namespace halfflow
