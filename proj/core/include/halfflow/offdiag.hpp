#pragma once

#include <vector>

#include "halfflow/field.hpp"

namespace halfflow {

// Function on off-diagonal point pairs of the circle, sampled with the
// base point x_i on the node grid and the partner y on the half-offset
// grid: the (i, m) entry is F(x_i, y_{i,m}) with
//
//   y_{i,m} = x_i + (m + 1/2) h,   m = 0 .. M-1,
//
// so the pair separation |x - y| = 2 sin((m + 1/2) h / 2) depends only
// on m and never vanishes.  All pair integrals below use the measure
// dy dx / |x - y| on this grid (weight h^2 / d_m per pair).
//
// Storage is dense, one M x M block per component; construction is
// rejected above the memory cap (default 2048 nodes).  Operators that
// only need pair sums (densities, remainders) stream over pairs
// without materializing a kernel and are not subject to the cap.
struct OffDiagKernel {
    CircleGrid grid;
    int n = 0;
    bool antisymmetric = false;
    bool sphere_warning = false; // set by constructors that expect on-sphere input
    std::vector<std::vector<double>> comp; // comp[c][i*M + m]

    OffDiagKernel() = default;
    OffDiagKernel(const CircleGrid& g, int components, int max_nodes = 2048);

    double& at(int c, int i, int m) { return comp[c][static_cast<size_t>(i) * grid.M + m]; }
    double at(int c, int i, int m) const { return comp[c][static_cast<size_t>(i) * grid.M + m]; }

    // Separation of the pairs at offset m.
    double separation(int m) const;

    // Deviation from F(x,y) = -F(y,x), measured by interpolating the
    // reversed pair from the two stored pairs that flank it (same
    // separation, base shifted by +-h/2).  The interpolation itself is
    // O(h^2) for kernels smooth along fixed-separation lines, so even an
    // exactly antisymmetric kernel reports an O(h^2) defect (shrinking
    // ~4x per grid doubling), not round-off.
    double antisymmetry_defect() const;

    double max_abs() const;
};

// Shared per-grid tables for half-offset quadratures.
struct HalfOffsetWorkspace {
    CircleGrid grid;
    std::vector<double> half_shift; // interpolation kernel node -> half node
    std::vector<double> dist;       // d_m
    std::vector<double> w_density;  // h / d_m^2

    explicit HalfOffsetWorkspace(const CircleGrid& g);
};

// Fractional gradient d_s u(x,y) = (u(x) - u(y)) / |x - y|^s.
// Antisymmetric by construction.  Requires s in (0, 1).
OffDiagKernel d_s(const Field& u, double s);

// Pointwise pair contraction F.G(x) = \int F(x,y).G(x,y) dy/|x-y|,
// contracting components.  Returns a scalar circle Field.
Field pairing(const OffDiagKernel& F, const OffDiagKernel& G);

// L^2_od norm (sum over pairs of |F|^2 h^2 / d_m)^{1/2}.
double l2od_norm(const OffDiagKernel& F);

// Global duality pairing <div_{1/2} F, phi> = \int\int F . d_{1/2}phi dmu.
// phi must live on the same grid with the same component count.
double frac_div_pair(const OffDiagKernel& F, const Field& phi);

// |d_{1/2}u|^2 (x) = \int |u(x)-u(y)|^2 / |x-y|^2 dy by half-offset
// quadrature.  Streams over pairs; safe at any resolution.  The
// degree-one circle map gives the constant 2 pi.
Field sq_grad_density(const Field& u);
Field sq_grad_density(const Field& u, const HalfOffsetWorkspace& ws,
                      Field* u_half_out = nullptr);

// Nodal divergence field D = div_{1/2} F, defined by duality: the
// synthesized D satisfies h sum_i D(x_i) phi(x_i) = frac_div_pair(F, phi)
// exactly for every trigonometric mode below Nyquist (componentwise).
Field div_field(const OffDiagKernel& F);

} // namespace halfflow
