#include "halfflow/offdiag.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "halfflow/fft.hpp"
#include "halfflow/parallel.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

OffDiagKernel::OffDiagKernel(const CircleGrid& g, int components, int max_nodes)
    : grid(g), n(components) {
    if (g.M > max_nodes)
        throw std::length_error("OffDiagKernel: node count exceeds the dense-storage cap");
    if (n < 1 || n > 3)
        throw std::invalid_argument("OffDiagKernel: component count must be 1, 2 or 3");
    comp.assign(n, std::vector<double>(static_cast<size_t>(g.M) * g.M, 0.0));
}

double OffDiagKernel::separation(int m) const {
    return 2.0 * std::sin(0.5 * (m + 0.5) * grid.h());
}

double OffDiagKernel::antisymmetry_defect() const {
    const int M = grid.M;
    double worst = 0.0;
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < M; ++i) {
            for (int m = 0; m < M; ++m) {
                const int bA = (i + m) % M;
                const int bB = (i + m + 1) % M;
                const int mr = M - 1 - m;
                const double reversed = 0.5 * (at(c, bA, mr) + at(c, bB, mr));
                worst = std::max(worst, std::abs(at(c, i, m) + reversed));
            }
        }
    }
    return worst;
}

double OffDiagKernel::max_abs() const {
    double worst = 0.0;
    for (const auto& block : comp)
        for (double v : block) worst = std::max(worst, std::abs(v));
    return worst;
}

HalfOffsetWorkspace::HalfOffsetWorkspace(const CircleGrid& g)
    : grid(g), half_shift(half_shift_kernel(g)), dist(g.M), w_density(g.M) {
    const double h = g.h();
    for (int m = 0; m < g.M; ++m) {
        dist[m] = 2.0 * std::sin(0.5 * (m + 0.5) * h);
        w_density[m] = h / (dist[m] * dist[m]);
    }
}

OffDiagKernel d_s(const Field& u, double s) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("d_s: exponent must lie in (0, 1)");
    const CircleGrid& g = u.circle();
    HalfOffsetWorkspace ws(g);
    Field uh = apply_circulant(u, ws.half_shift);

    OffDiagKernel F(g, u.n);
    F.antisymmetric = true;
    std::vector<double> dpow(static_cast<size_t>(g.M));
    for (int m = 0; m < g.M; ++m) dpow[m] = std::pow(ws.dist[m], s);

    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            for (int m = 0; m < g.M; ++m) {
                const int im = i + m < g.M ? i + m : i + m - g.M;
                for (int c = 0; c < u.n; ++c)
                    F.at(c, i, m) = (u.at(i, c) - uh.at(im, c)) / dpow[m];
            }
        }
    });
    return F;
}

Field pairing(const OffDiagKernel& F, const OffDiagKernel& G) {
    if (F.grid != G.grid || F.n != G.n)
        throw std::invalid_argument("pairing: kernels must share grid and components");
    const int M = F.grid.M;
    const double h = F.grid.h();
    std::vector<double> w(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) w[m] = h / F.separation(m);

    Field out(F.grid, 1);
    parallel_for(M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double acc = 0.0;
            for (int m = 0; m < M; ++m) {
                double dot = 0.0;
                for (int c = 0; c < F.n; ++c) dot += F.at(c, i, m) * G.at(c, i, m);
                acc += w[m] * dot;
            }
            out.at(i, 0) = acc;
        }
    });
    return out;
}

double l2od_norm(const OffDiagKernel& F) {
    const int M = F.grid.M;
    const double h = F.grid.h();
    std::vector<double> w(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) w[m] = h * h / F.separation(m);

    std::vector<double> row(static_cast<size_t>(M), 0.0);
    parallel_for(M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double acc = 0.0;
            for (int c = 0; c < F.n; ++c)
                for (int m = 0; m < M; ++m) {
                    const double v = F.at(c, i, m);
                    acc += w[m] * v * v;
                }
            row[i] = acc;
        }
    });
    double total = 0.0;
    for (int i = 0; i < M; ++i) total += row[i]; // fixed order: deterministic
    return std::sqrt(total);
}

double frac_div_pair(const OffDiagKernel& F, const Field& phi) {
    if (!(phi.is_circle()) || phi.circle() != F.grid || phi.n != F.n)
        throw std::invalid_argument("frac_div_pair: test field must match the kernel");
    const int M = F.grid.M;
    const double h = F.grid.h();
    HalfOffsetWorkspace ws(F.grid);
    Field ph = apply_circulant(phi, ws.half_shift);

    // weight of d_{1/2}phi times the pair measure: h^2 / d_m^{3/2}
    std::vector<double> w(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) w[m] = h * h / std::pow(ws.dist[m], 1.5);

    std::vector<double> row(static_cast<size_t>(M), 0.0);
    parallel_for(M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double acc = 0.0;
            for (int m = 0; m < M; ++m) {
                const int im = i + m < M ? i + m : i + m - M;
                double dot = 0.0;
                for (int c = 0; c < F.n; ++c)
                    dot += F.at(c, i, m) * (phi.at(i, c) - ph.at(im, c));
                acc += w[m] * dot;
            }
            row[i] = acc;
        }
    });
    double total = 0.0;
    for (int i = 0; i < M; ++i) total += row[i];
    return total;
}

Field sq_grad_density(const Field& u) {
    HalfOffsetWorkspace ws(u.circle());
    return sq_grad_density(u, ws, nullptr);
}

Field sq_grad_density(const Field& u, const HalfOffsetWorkspace& ws, Field* u_half_out) {
    const CircleGrid& g = u.circle();
    if (g != ws.grid) throw std::invalid_argument("sq_grad_density: workspace grid mismatch");
    Field uh = apply_circulant(u, ws.half_shift);

    Field out(g, 1);
    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            double acc = 0.0;
            for (int m = 0; m < g.M; ++m) {
                const int im = i + m < g.M ? i + m : i + m - g.M;
                double sq = 0.0;
                for (int c = 0; c < u.n; ++c) {
                    const double d = u.at(i, c) - uh.at(im, c);
                    sq += d * d;
                }
                acc += ws.w_density[m] * sq;
            }
            out.at(i, 0) = acc;
        }
    });
    if (u_half_out) *u_half_out = std::move(uh);
    return out;
}

Field div_field(const OffDiagKernel& F) {
    const CircleGrid& g = F.grid;
    const int M = g.M;
    const double h = g.h();

    std::vector<double> w(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) w[m] = h * h / std::pow(F.separation(m), 1.5);

    Field out(g, F.n);
    for (int c = 0; c < F.n; ++c) {
        // Base-side and partner-side weight profiles of the duality
        // pairing: <div F, phi> = sum_i A_i phi(x_i) - sum_j B_j phi(z_j).
        std::vector<std::complex<double>> A(static_cast<size_t>(M), 0.0);
        std::vector<std::complex<double>> B(static_cast<size_t>(M), 0.0);
        for (int i = 0; i < M; ++i) {
            for (int m = 0; m < M; ++m) {
                const int im = i + m < M ? i + m : i + m - M;
                const double fw = F.at(c, i, m) * w[m];
                A[i] += fw;
                B[im] += fw;
            }
        }
        // Matching h sum_i D_i phi(x_i) for every mode |k| < M/2 gives
        // hat(D)(k) = (hat(A)(k) - e^{-ikh/2} hat(B)(k)) / h.
        auto Ah = forward_dft(A);
        auto Bh = forward_dft(B);
        std::vector<std::complex<double>> Dh(static_cast<size_t>(M));
        for (int i = 0; i < M; ++i) {
            const int k = index_to_wavenumber(i, M);
            const std::complex<double> phase =
                std::exp(std::complex<double>(0.0, -0.5 * k * h));
            Dh[i] = (Ah[i] - phase * Bh[i]) / h;
        }
        auto D = backward_dft(Dh);
        for (int j = 0; j < M; ++j) out.at(j, c) = D[j].real();
    }
    return out;
}

} // namespace halfflow
