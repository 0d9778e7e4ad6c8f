// Spectral transform and multiplier layer, validated against frozen
// analytic oracles:
//
//   * transform pair is exact on the grid, hat(u)(k) = (1/M) sum u e^{-ikx}
//   * (-Delta)^s cos(kx) = k^{2s} cos(kx) for every mode below Nyquist
//   * discrete Parseval: h sum |u|^2 = 2 pi sum |hat(u)|^2
//   * half energy of (cos kx, sin kx) is pi k
//   * periodized Poisson kernel equals the closed form
//         P(t, x) = sinh(t) / (2 pi (cosh t - cos x)),
//     obtained by summing the geometric series
//         (1/2pi) sum_k e^{-t|k|} e^{ikx}
//     independently of the image-sum construction under test
//   * e^{-t(-Delta)^{1/2}} equals convolution with that kernel
//   * circulant application commutes with grid rotations bit-exactly.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "halfflow/spectral.hpp"
#include "test_helpers.hpp"

using namespace halfflow;
using namespace halfflow::testing;

namespace {

double poisson_closed_form(double t, double x) {
    return std::sinh(t) / (2.0 * pi * (std::cosh(t) - std::cos(x)));
}

} // namespace

TEST_SUITE("spectral_core") {

TEST_CASE("transform round trip is exact") {
    const CircleGrid g{128};
    const Field u = random_field(g, 2, 1234);
    const Field back = from_spectral(to_spectral(u));
    CHECK(max_abs_difference(u, back) <= 1e-13);
}

TEST_CASE("coefficients follow the 1/M forward convention") {
    const CircleGrid g{64};
    Field u(g, 2);
    for (int j = 0; j < g.M; ++j) {
        u.at(j, 0) = std::cos(3.0 * g.node(j));
        u.at(j, 1) = std::sin(5.0 * g.node(j));
    }
    const SpectralField su = to_spectral(u);
    double worst = 0.0;
    for (int idx = 0; idx < g.M; ++idx) {
        const int k = su.wavenumber(idx);
        std::complex<double> want0{0.0, 0.0}, want1{0.0, 0.0};
        if (k == 3 || k == -3) want0 = {0.5, 0.0};
        if (k == 5) want1 = {0.0, -0.5};
        if (k == -5) want1 = {0.0, 0.5};
        worst = std::max(worst, std::abs(su.coeffs[0][idx] - want0));
        worst = std::max(worst, std::abs(su.coeffs[1][idx] - want1));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("fractional Laplacian is the |k|^{2s} multiplier") {
    const CircleGrid g{128};
    for (const int k : {1, 2, 5, 17, 32}) {
        const Field u = degree_map(g, k);
        for (const double s : {0.25, 0.5, 1.0}) {
            const Field Lu = frac_laplacian(u, s);
            const double factor = std::pow(static_cast<double>(k), 2.0 * s);
            double worst = 0.0;
            for (int j = 0; j < g.M; ++j)
                for (int c = 0; c < 2; ++c)
                    worst = std::max(worst,
                                     std::abs(Lu.at(j, c) - factor * u.at(j, c)));
            CHECK(worst <= 1e-12 * factor);
        }
    }
    CHECK_THROWS_AS((void)frac_laplacian(degree_map(g, 1), 0.0), std::exception);
    CHECK_THROWS_AS((void)frac_laplacian(degree_map(g, 1), 1.5), std::exception);
}

TEST_CASE("Parseval, Sobolev norms, and half energy") {
    const CircleGrid g{64};
    Field u(g, 2);
    for (int j = 0; j < g.M; ++j) {
        u.at(j, 0) = std::cos(3.0 * g.node(j));
        u.at(j, 1) = std::sin(5.0 * g.node(j));
    }
    // int |u|^2 = pi + pi = 2 pi; Sobolev s = 0 inhomogeneous = L2.
    CHECK(std::abs(l2_norm(u) - std::sqrt(2.0 * pi)) <= 1e-12);
    CHECK(std::abs(sobolev_norm(u, 0.0, false) - std::sqrt(2.0 * pi)) <= 1e-12);
    // homogeneous H^{1/2}: 2 pi (3 + 5)/2 = 8 pi.
    CHECK(std::abs(sobolev_norm(u, 0.5, true) - std::sqrt(8.0 * pi)) <= 1e-12);
    // E = pi sum |k||hat u|^2 = pi (3/2 + 5/2) = 4 pi = homog^2 / 2.
    CHECK(std::abs(half_energy(u) - 4.0 * pi) <= 1e-11);

    // Degree-one map: E = pi exactly.
    CHECK(std::abs(half_energy(degree_map(g, 1)) - pi) <= 1e-12);
    // Constant map: zero energy.
    Field c(g, 2);
    for (int j = 0; j < g.M; ++j) c.at(j, 0) = 1.0;
    CHECK(half_energy(c) <= 1e-14);
}

TEST_CASE("heat semigroup matches the exponential multiplier") {
    const CircleGrid g{64};
    const Field u = degree_map(g, 3);
    for (const double t : {0.1, 1.0}) {
        const Field half = heat_semigroup(u, t, 0.5);
        const Field full = heat_semigroup(u, t, 1.0);
        double worst_h = 0.0, worst_f = 0.0;
        for (int j = 0; j < g.M; ++j)
            for (int c = 0; c < 2; ++c) {
                worst_h = std::max(worst_h, std::abs(half.at(j, c) -
                                                     std::exp(-3.0 * t) * u.at(j, c)));
                worst_f = std::max(worst_f, std::abs(full.at(j, c) -
                                                     std::exp(-9.0 * t) * u.at(j, c)));
            }
        CHECK(worst_h <= 1e-12);
        CHECK(worst_f <= 1e-12);
    }
    // t = 0 is the identity bit-for-bit.
    const Field same = heat_semigroup(u, 0.0, 0.5);
    CHECK(same.values == u.values);
}

TEST_CASE("Poisson kernel equals the geometric-series closed form") {
    double worst = 0.0;
    for (const double t : {0.1, 0.5, 1.0, 3.0}) {
        for (int i = 0; i < 32; ++i) {
            const double x = -pi + 2.0 * pi * i / 32.0;
            worst = std::max(worst,
                             std::abs(poisson_kernel(t, x) - poisson_closed_form(t, x)));
        }
    }
    CHECK(worst <= 1e-6);

    // Normalization over one period (trapezoid = plain sum for periodic).
    const CircleGrid g{256};
    for (const double t : {0.25, 1.0}) {
        double mass = 0.0;
        for (int j = 0; j < g.M; ++j) mass += g.h() * poisson_kernel(t, g.node(j));
        CHECK(std::abs(mass - 1.0) <= 2e-6);
    }
}

TEST_CASE("semigroup agrees with Poisson convolution") {
    const CircleGrid g{128};
    const Field u = degree_map(g, 2);
    const double t = 0.7;
    const Field viaMultiplier = heat_semigroup(u, t, 0.5);
    Field viaKernel(g, 2);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j) {
            const double w = g.h() * poisson_kernel(t, g.node(i) - g.node(j));
            for (int c = 0; c < 2; ++c) viaKernel.at(i, c) += w * u.at(j, c);
        }
    CHECK(max_abs_difference(viaMultiplier, viaKernel) <= 1e-6);
}

TEST_CASE("circulant kernels realize their symbols") {
    const CircleGrid g{64};
    const Field u = degree_map(g, 3);

    // |k| symbol == (-Delta)^{1/2}.
    const SpectralField su = to_spectral(u);
    std::vector<double> symbol(g.M);
    for (int idx = 0; idx < g.M; ++idx) symbol[idx] = std::abs(su.wavenumber(idx));
    const std::vector<double> K = kernel_from_real_symbol(g, symbol);
    CHECK(max_abs_difference(apply_circulant(u, K), frac_laplacian(u, 0.5)) <= 1e-11);

    // Quarter Laplacian kernel: (-Delta)^{1/4}.
    const std::vector<double> Q = quarter_laplacian_kernel(g);
    CHECK(max_abs_difference(apply_circulant(u, Q), frac_laplacian(u, 0.25)) <= 1e-11);

    // Half-node shift: cos(3x) -> cos(3(x + h/2)) for band-limited input.
    const std::vector<double> H = half_shift_kernel(g);
    const Field shifted = apply_circulant(u, H);
    double worst = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const double x = g.node(j) + 0.5 * g.h();
        worst = std::max(worst, std::abs(shifted.at(j, 0) - std::cos(3.0 * x)));
        worst = std::max(worst, std::abs(shifted.at(j, 1) - std::sin(3.0 * x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("circulant application commutes with rotation bit-exactly") {
    const CircleGrid g{64};
    const Field u = random_field(g, 2, 77);
    const std::vector<double> Q = quarter_laplacian_kernel(g);
    const int r = 11;
    const Field a = apply_circulant(rotate_nodes(u, r), Q);
    const Field b = rotate_nodes(apply_circulant(u, Q), r);
    CHECK(a.values == b.values); // exact equality, not a tolerance
}

TEST_CASE("principal value route cross-validates the multiplier") {
    const CircleGrid g{256};
    const Field u = degree_map(g, 3);
    const Field pv = pv_half_laplacian(u, 1.0 / pi); // analytic C_pv
    const Field fl = frac_laplacian(u, 0.5);
    CHECK(l2_distance(pv, fl) / l2_norm(fl) <= 1e-2);
}

} // TEST_SUITE
