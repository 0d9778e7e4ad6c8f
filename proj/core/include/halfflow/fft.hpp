#pragma once

#include <complex>
#include <vector>

namespace halfflow {

// Thin wrappers over FFTW with the plan cache hidden in the source
// file.  forward_dft is normalized by 1/M so the output coefficients
// follow the analysis convention hat(u)(k) = (1/2pi) <u, e^{ikx}>;
// backward_dft is the plain synthesis sum, so backward(forward(u)) = u.
// Coefficient storage uses FFTW index order: index i holds wavenumber
// i for i < M/2 and i - M otherwise.
std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> backward_dft(const std::vector<std::complex<double>>& in);

// Wavenumber for coefficient index i in a length-M transform.
int index_to_wavenumber(int i, int M);

} // namespace halfflow
