#pragma once

#include <complex>
#include <vector>

#include "halfflow/field.hpp"

namespace halfflow {

// Fourier-side view of a circle Field.  coeffs[c] holds the M
// coefficients of component c in FFTW index order (see fft.hpp), with
// the convention
//
//   hat(u)(k) = (1/M) sum_j u(x_j) e^{-i k x_j}
//             ~ (1/2pi) \int u e^{-ikx} dx,
//
// so Parseval reads \int |u|^2 dx = 2pi sum_k |hat(u)(k)|^2.
struct SpectralField {
    CircleGrid grid;
    int n = 0;
    std::vector<std::vector<std::complex<double>>> coeffs;

    int wavenumber(int index) const;
};

// Exact (to round-off) transform pair; from_spectral(to_spectral(u)) == u.
SpectralField to_spectral(const Field& u);
Field from_spectral(const SpectralField& su);

// Fractional Laplacian (-Delta)^s as the Fourier multiplier |k|^{2s},
// applied componentwise.  Requires s in (0, 1] and a circle field.
Field frac_laplacian(const Field& u, double s);

// Half Laplacian by principal-value quadrature:
//   C_pv * sum_m h * (u(x) - u(x + (m+1/2) h)) / |x - y_m|^2
// with |.| chordal and the off-node samples obtained by spectral
// interpolation.  Independent approximation path from frac_laplacian;
// the two are cross-validated by calibration.
Field pv_half_laplacian(const Field& u, double C_pv);

// Semigroup e^{-t (-Delta)^s}: multiplier exp(-|k|^{2s} t).  t >= 0;
// t == 0 returns u unchanged bit-exactly.
Field heat_semigroup(const Field& u, double t, double s);

// Periodized Poisson kernel for s = 1/2: sum of line kernels
// (1/pi) t/(t^2 + (x + 2pi m)^2) over |m| <= 50 images plus the
// analytic arctan tail of the image sum.  Integrates to 1 over one
// period within 1e-6 for t in (0, 5].
double poisson_kernel(double t, double x);

// Sobolev norm from the coefficients:
//   homogeneous:  sqrt(2pi sum_k |k|^{2s}     |hat(u)(k)|^2)
//   otherwise:    sqrt(2pi sum_k (1+k^2)^s    |hat(u)(k)|^2)
// summed over components.  Accepts any real s (negative orders give
// the dual norms used by the compensation diagnostics).
double sobolev_norm(const Field& u, double s, bool homogeneous);

// Half energy E(u) = (1/2) \int |(-Delta)^{1/4} u|^2 dx
//                  = pi sum_k |k| |hat(u)(k)|^2.
double half_energy(const Field& u);

// --- circulant machinery -------------------------------------------------
//
// Real circulant kernels are the translation-equivariant form of the
// spectral multipliers: applying them by relative-index summation
// makes grid shifts commute with the operator bit-exactly, which the
// flow relies on.  The kernel is the inverse DFT of the symbol.

// Kernel K with (K*u)(i) = sum_m K[m] u((i+m) mod M) realizing the
// multiplier symbol(k).  symbol is evaluated at each wavenumber; it
// must be conjugate-symmetric over k for a real kernel (real symbols
// are; the half-shift handles Nyquist separately).
std::vector<double> kernel_from_symbol(const CircleGrid& g,
                                       const std::vector<std::complex<double>>& symbol);

// Real multiplier convenience: symbol[k] = f(|k|).
std::vector<double> kernel_from_real_symbol(const CircleGrid& g,
                                            const std::vector<double>& symbol_by_index);

// (K*u)(i) = sum_m K[m] u((i+m) mod M), componentwise.
Field apply_circulant(const Field& u, const std::vector<double>& kernel);
void apply_circulant_component(const double* in, double* out, int M, int n,
                               const std::vector<double>& kernel);

// Kernel of the half-node interpolation u(x_j) -> u(x_j + h/2):
// symbol e^{i k h / 2} with the Nyquist coefficient zeroed (its cosine
// vanishes at every half node).  Exact for fields band-limited below
// Nyquist.
std::vector<double> half_shift_kernel(const CircleGrid& g);

// Kernel of the multiplier |k|^{1/2}, i.e. (-Delta)^{1/4}.
std::vector<double> quarter_laplacian_kernel(const CircleGrid& g);

} // namespace halfflow
