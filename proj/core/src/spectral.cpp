#include "halfflow/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "halfflow/fft.hpp"
#include "halfflow/parallel.hpp"

namespace halfflow {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

std::vector<std::complex<double>> component_to_complex(const Field& u, int c) {
    const int M = u.size();
    std::vector<std::complex<double>> buf(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) buf[j] = u.at(j, c);
    return buf;
}

// Applies a real multiplier given by symbol(|k|) componentwise via the
// transform pair.  Used by the diagnostic-path operators; the flow
// path uses circulant kernels instead.
Field apply_real_multiplier(const Field& u, const std::vector<double>& symbol) {
    const CircleGrid& g = u.circle();
    Field out(g, u.n);
    for (int c = 0; c < u.n; ++c) {
        auto coeffs = forward_dft(component_to_complex(u, c));
        for (int i = 0; i < g.M; ++i) coeffs[i] *= symbol[i];
        auto back = backward_dft(coeffs);
        for (int j = 0; j < g.M; ++j) out.at(j, c) = back[j].real();
    }
    return out;
}

} // namespace

int SpectralField::wavenumber(int index) const { return index_to_wavenumber(index, grid.M); }

SpectralField to_spectral(const Field& u) {
    SpectralField su;
    su.grid = u.circle();
    su.n = u.n;
    su.coeffs.resize(u.n);
    for (int c = 0; c < u.n; ++c) su.coeffs[c] = forward_dft(component_to_complex(u, c));
    return su;
}

Field from_spectral(const SpectralField& su) {
    Field u(su.grid, su.n);
    for (int c = 0; c < su.n; ++c) {
        auto back = backward_dft(su.coeffs[c]);
        for (int j = 0; j < su.grid.M; ++j) u.at(j, c) = back[j].real();
    }
    return u;
}

Field frac_laplacian(const Field& u, double s) {
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("frac_laplacian: order s must lie in (0, 1]");
    const CircleGrid& g = u.circle();
    std::vector<double> symbol(static_cast<size_t>(g.M));
    for (int i = 0; i < g.M; ++i) {
        const double k = std::abs(index_to_wavenumber(i, g.M));
        symbol[i] = std::pow(k, 2.0 * s);
    }
    return apply_real_multiplier(u, symbol);
}

Field pv_half_laplacian(const Field& u, double C_pv) {
    const CircleGrid& g = u.circle();
    const double h = g.h();
    const int M = g.M;

    Field uh = apply_circulant(u, half_shift_kernel(g));

    // Quadrature weights h / |x - y_m|^2 depend only on the offset.
    std::vector<double> w(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) {
        const double d = 2.0 * std::sin(0.5 * (m + 0.5) * h);
        w[m] = h / (d * d);
    }

    Field out(g, u.n);
    parallel_for(M, [&](int begin, int end) {
        for (int j = begin; j < end; ++j) {
            for (int c = 0; c < u.n; ++c) {
                double acc = 0.0;
                const double uj = u.at(j, c);
                for (int m = 0; m < M; ++m) {
                    const int jm = j + m < M ? j + m : j + m - M;
                    acc += w[m] * (uj - uh.at(jm, c));
                }
                out.at(j, c) = C_pv * acc;
            }
        }
    });
    return out;
}

Field heat_semigroup(const Field& u, double t, double s) {
    if (t < 0.0) throw std::invalid_argument("heat_semigroup: time must be nonnegative");
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("heat_semigroup: order s must lie in (0, 1]");
    if (t == 0.0) return u;
    const CircleGrid& g = u.circle();
    std::vector<double> symbol(static_cast<size_t>(g.M));
    for (int i = 0; i < g.M; ++i) {
        const double k = std::abs(index_to_wavenumber(i, g.M));
        symbol[i] = std::exp(-std::pow(k, 2.0 * s) * t);
    }
    return apply_real_multiplier(u, symbol);
}

double poisson_kernel(double t, double x) {
    if (t <= 0.0) throw std::invalid_argument("poisson_kernel: time must be positive");
    const double xw = wrap_angle(x);
    constexpr int images = 50;
    double sum = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double d = xw + two_pi * m;
        sum += t / (t * t + d * d);
    }
    sum /= pi;
    // Analytic tail of the image sum beyond |m| = images, from the
    // midpoint-rule integral of the remaining terms.
    const double edge = two_pi * (images + 0.5);
    const double tail = (pi - std::atan((edge + xw) / t) - std::atan((edge - xw) / t)) /
                        (2.0 * pi * pi);
    return sum + tail;
}

double sobolev_norm(const Field& u, double s, bool homogeneous) {
    SpectralField su = to_spectral(u);
    double acc = 0.0;
    for (int c = 0; c < su.n; ++c) {
        for (int i = 0; i < su.grid.M; ++i) {
            const double k = index_to_wavenumber(i, su.grid.M);
            const double weight = homogeneous
                                      ? (k == 0.0 ? 0.0 : std::pow(k * k, s))
                                      : std::pow(1.0 + k * k, s);
            acc += weight * std::norm(su.coeffs[c][i]);
        }
    }
    return std::sqrt(two_pi * acc);
}

double half_energy(const Field& u) {
    SpectralField su = to_spectral(u);
    double acc = 0.0;
    for (int c = 0; c < su.n; ++c)
        for (int i = 0; i < su.grid.M; ++i)
            acc += std::abs(static_cast<double>(su.wavenumber(i))) * std::norm(su.coeffs[c][i]);
    return pi * acc;
}

std::vector<double> kernel_from_symbol(const CircleGrid& g,
                                       const std::vector<std::complex<double>>& symbol) {
    if (static_cast<int>(symbol.size()) != g.M)
        throw std::invalid_argument("kernel_from_symbol: symbol length must equal M");
    // apply_circulant contracts kernel[m] with u((i+m) mod M), so the
    // mode e^{ikx} picks up sum_m kernel[m] e^{ikx_m}.  Building the
    // kernel with the conjugate phase, kernel[m] = (1/M) sum_k s(k)
    // e^{-ikx_m}, makes that sum equal s(k) exactly.
    auto fwd = forward_dft(symbol);
    std::vector<double> kernel(static_cast<size_t>(g.M));
    for (int j = 0; j < g.M; ++j) kernel[j] = fwd[j].real();
    return kernel;
}

std::vector<double> kernel_from_real_symbol(const CircleGrid& g,
                                            const std::vector<double>& symbol_by_index) {
    std::vector<std::complex<double>> symbol(symbol_by_index.size());
    for (size_t i = 0; i < symbol_by_index.size(); ++i) symbol[i] = symbol_by_index[i];
    return kernel_from_symbol(g, symbol);
}

void apply_circulant_component(const double* in, double* out, int M, int n,
                               const std::vector<double>& kernel) {
    // out(i) = sum_m K[m] in(i+m mod M): the summation index is the
    // relative offset, so grid translations commute bit-exactly.
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < M; ++i) {
            double acc = 0.0;
            for (int m = 0; m < M; ++m) {
                const int im = i + m < M ? i + m : i + m - M;
                acc += kernel[m] * in[static_cast<size_t>(im) * n + c];
            }
            out[static_cast<size_t>(i) * n + c] = acc;
        }
    }
}

Field apply_circulant(const Field& u, const std::vector<double>& kernel) {
    const CircleGrid& g = u.circle();
    Field out(g, u.n);
    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            for (int c = 0; c < u.n; ++c) {
                double acc = 0.0;
                for (int m = 0; m < g.M; ++m) {
                    const int im = i + m < g.M ? i + m : i + m - g.M;
                    acc += kernel[m] * u.at(im, c);
                }
                out.at(i, c) = acc;
            }
        }
    });
    return out;
}

std::vector<double> half_shift_kernel(const CircleGrid& g) {
    std::vector<std::complex<double>> symbol(static_cast<size_t>(g.M));
    for (int i = 0; i < g.M; ++i) {
        const int k = index_to_wavenumber(i, g.M);
        if (i == g.M / 2) {
            symbol[i] = 0.0; // cos(M x / 2) vanishes at all half nodes
        } else {
            symbol[i] = std::exp(std::complex<double>(0.0, k * g.h() * 0.5));
        }
    }
    return kernel_from_symbol(g, symbol);
}

std::vector<double> quarter_laplacian_kernel(const CircleGrid& g) {
    std::vector<double> symbol(static_cast<size_t>(g.M));
    for (int i = 0; i < g.M; ++i)
        symbol[i] = std::sqrt(std::abs(static_cast<double>(index_to_wavenumber(i, g.M))));
    return kernel_from_real_symbol(g, symbol);
}

} // namespace halfflow
