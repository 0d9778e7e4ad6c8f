#include "halfflow/calculus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "halfflow/fft.hpp"
#include "halfflow/parallel.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double pi = std::numbers::pi;

Field mode_field(const CircleGrid& g, int k, bool cosine) {
    Field f(g, 1);
    for (int j = 0; j < g.M; ++j)
        f.at(j, 0) = cosine ? std::cos(k * g.node(j)) : std::sin(k * g.node(j));
    return f;
}

double l2_inner(const Field& a, const Field& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return a.circle().h() * s;
}

Field degree_one_map(const CircleGrid& g) {
    Field u(g, 2);
    for (int j = 0; j < g.M; ++j) {
        u.at(j, 0) = std::cos(g.node(j));
        u.at(j, 1) = std::sin(g.node(j));
    }
    return u;
}

} // namespace

CalibrationRecord calibrate(const CircleGrid& g) {
    CalibrationRecord rec;
    rec.M = g.M;
    const int K = std::max(2, g.M / 8);

    // C_half: fit pair-quadrature Dirichlet forms against the spectral
    // pairing over the low modes, cosine and sine branches.
    double num = 0.0, den = 0.0;
    std::vector<double> pair_vals, spec_vals;
    for (int k = 1; k <= K; ++k) {
        for (bool cosine : {true, false}) {
            Field f = mode_field(g, k, cosine);
            const double pair_val = frac_div_pair(d_s(f, 0.5), f);
            const double spec_val = l2_inner(frac_laplacian(f, 0.5), f);
            pair_vals.push_back(pair_val);
            spec_vals.push_back(spec_val);
            num += pair_val * spec_val;
            den += pair_val * pair_val;
        }
    }
    rec.C_half = num / den;
    double rnum = 0.0, rden = 0.0;
    for (size_t i = 0; i < pair_vals.size(); ++i) {
        const double r = rec.C_half * pair_vals[i] - spec_vals[i];
        rnum += r * r;
        rden += spec_vals[i] * spec_vals[i];
    }
    rec.residual_half = std::sqrt(rnum / rden);

    // C_pv: fit the raw half-offset PV sum against the multiplier.
    num = den = rnum = rden = 0.0;
    for (int k = 1; k <= K; ++k) {
        Field f = mode_field(g, k, true);
        Field raw = pv_half_laplacian(f, 1.0);
        Field target = frac_laplacian(f, 0.5);
        num += l2_inner(raw, target);
        den += l2_inner(raw, raw);
    }
    rec.C_pv = num / den;
    for (int k = 1; k <= K; ++k) {
        Field f = mode_field(g, k, true);
        Field raw = pv_half_laplacian(f, 1.0);
        Field target = frac_laplacian(f, 0.5);
        double diff = 0.0;
        for (size_t i = 0; i < raw.values.size(); ++i) {
            const double r = rec.C_pv * raw.values[i] - target.values[i];
            diff += r * r;
        }
        rnum += diff;
        rden += l2_inner(target, target) / f.circle().h();
    }
    rec.residual_pv = std::sqrt(rnum / rden);

    // Nonlinearity scale pinned by stationarity of the degree-one map.
    {
        Field u = degree_one_map(g);
        Field density = sq_grad_density(u);
        Field rhs_raw(g, u.n);
        for (int j = 0; j < g.M; ++j)
            for (int c = 0; c < u.n; ++c) rhs_raw.at(j, c) = u.at(j, c) * density.at(j, 0);
        Field target = frac_laplacian(u, 0.5);
        rec.nonlinearity_factor = l2_inner(rhs_raw, target) / l2_inner(rhs_raw, rhs_raw);
        double diff = 0.0;
        for (size_t i = 0; i < rhs_raw.values.size(); ++i) {
            const double r = rec.nonlinearity_factor * rhs_raw.values[i] - target.values[i];
            diff += r * r;
        }
        rec.residual_nonlinearity =
            std::sqrt(g.h() * diff) / std::sqrt(l2_inner(target, target));
    }

    if (rec.residual_half > 0.05 || rec.residual_pv > 0.05 ||
        rec.residual_nonlinearity > 0.05)
        throw std::runtime_error("calibrate: fit residual above 5%, quadrature inconsistent");
    return rec;
}

OffDiagKernel shatah_current(const Field& u, int i, int j, const ThresholdConfig& thresholds) {
    if (i < 0 || j < 0 || i >= u.n || j >= u.n || i == j)
        throw std::invalid_argument("shatah_current: component indices out of range");
    const CircleGrid& g = u.circle();
    OffDiagKernel grad = d_s(u, 0.5);

    OffDiagKernel Omega(g, 1);
    Omega.antisymmetric = true; // (u_i(x)-u_i(y)) d_{1/2}u_j cancels against the swap
    Omega.sphere_warning = u.max_sphere_defect() > thresholds.sphere_tol;
    for (int a = 0; a < g.M; ++a)
        for (int m = 0; m < g.M; ++m)
            Omega.at(0, a, m) =
                u.at(a, i) * grad.at(j, a, m) - u.at(a, j) * grad.at(i, a, m);
    return Omega;
}

Field solve_half_poisson(const Field& gfield, std::vector<double>* removed_mean) {
    SpectralField sg = to_spectral(gfield);
    if (removed_mean) removed_mean->assign(gfield.n, 0.0);
    for (int c = 0; c < sg.n; ++c) {
        if (removed_mean) (*removed_mean)[c] = sg.coeffs[c][0].real();
        sg.coeffs[c][0] = 0.0;
        for (int idx = 1; idx < sg.grid.M; ++idx) {
            const double k = std::abs(static_cast<double>(sg.wavenumber(idx)));
            sg.coeffs[c][idx] /= k;
        }
    }
    return from_spectral(sg);
}

DivfreeCorrection divfree_correction(const OffDiagKernel& Omega, double delta,
                                     const CalibrationRecord& calib) {
    if (!(delta > 0.0 && delta < pi))
        throw std::invalid_argument("divfree_correction: cutoff must lie in (0, pi)");
    if (calib.M != Omega.grid.M)
        throw std::invalid_argument("divfree_correction: calibration record grid mismatch");

    DivfreeCorrection res;
    res.cutoff_distance = delta;
    res.corrected = Omega;
    const int M = Omega.grid.M;
    for (int m = 0; m < M; ++m) {
        if (Omega.separation(m) >= delta) continue;
        for (int c = 0; c < Omega.n; ++c)
            for (int i = 0; i < M; ++i) res.corrected.at(c, i, m) = 0.0;
    }

    Field D = div_field(res.corrected);
    Field h = solve_half_poisson(D);
    for (double& v : h.values) v *= calib.C_half;
    res.h_delta = h;
    res.h_half_norm = sobolev_norm(h, 0.5, true);

    OffDiagKernel grad_h = d_s(h, 0.5);
    for (int c = 0; c < Omega.n; ++c)
        for (size_t idx = 0; idx < res.corrected.comp[c].size(); ++idx)
            res.corrected.comp[c][idx] -= grad_h.comp[c][idx];
    // cutoff and gradient kernels are both antisymmetric
    res.corrected.antisymmetric = Omega.antisymmetric;
    return res;
}

Field remainder_T(const Field& u, const Field& v, const Field& w) {
    const CircleGrid& g = u.circle();
    if (!(v.is_circle() && w.is_circle()) || v.circle() != g || w.circle() != g ||
        v.n != u.n || w.n != u.n)
        throw std::invalid_argument("remainder_T: fields must share grid and components");

    HalfOffsetWorkspace ws(g);
    Field uh = apply_circulant(u, ws.half_shift);
    Field vh = apply_circulant(v, ws.half_shift);
    Field wh = apply_circulant(w, ws.half_shift);
    const double h = g.h();

    // Combined pair weight: the three gradient exponents 1/2, 1/4, 1/4
    // and the measure dy/|x-y| give h / d_m^2 per pair.
    std::vector<double> weight(static_cast<size_t>(g.M));
    for (int m = 0; m < g.M; ++m) weight[m] = h / (ws.dist[m] * ws.dist[m]);

    Field out(g, u.n);
    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            for (int c = 0; c < u.n; ++c) {
                double acc = 0.0;
                for (int m = 0; m < g.M; ++m) {
                    const int im = i + m < g.M ? i + m : i + m - g.M;
                    double vw = 0.0;
                    for (int k = 0; k < u.n; ++k)
                        vw += (v.at(i, k) - vh.at(im, k)) * (w.at(i, k) - wh.at(im, k));
                    acc += weight[m] * (u.at(i, c) - uh.at(im, c)) * vw;
                }
                out.at(i, c) = 0.5 * acc;
            }
        }
    });
    return out;
}

double wente_check(const OffDiagKernel& F, const Field& g) {
    if (!g.is_circle() || g.circle() != F.grid || g.n != F.n)
        throw std::invalid_argument("wente_check: field must match the kernel");
    const CircleGrid& grid = F.grid;
    const double f_norm = l2od_norm(F);
    const double g_norm = sobolev_norm(g, 0.5, true);
    if (f_norm == 0.0 || g_norm == 0.0) return 0.0;

    const int K = std::max(2, grid.M / 8);
    for (int k = 1; k <= K; ++k) {
        for (bool cosine : {true, false}) {
            Field phi(grid, F.n);
            for (int j = 0; j < grid.M; ++j) {
                const double v =
                    cosine ? std::cos(k * grid.node(j)) : std::sin(k * grid.node(j));
                for (int c = 0; c < F.n; ++c) phi.at(j, c) = v;
            }
            const double p = frac_div_pair(F, phi);
            const double rel =
                std::abs(p) / (f_norm * sobolev_norm(phi, 0.5, false));
            if (rel > 1e-6)
                throw std::domain_error(
                    "wente_check: kernel is not divergence-free (mode " +
                    std::to_string(k) + " pairs to " + std::to_string(rel) + ")");
        }
    }

    Field p = pairing(F, d_s(g, 0.5));
    return sobolev_norm(p, -0.5, false) / (f_norm * g_norm);
}

double gagliardo_local(const Field& u, const Arc& A, const Arc& B) {
    const CircleGrid& g = u.circle();
    if (A.radius <= 0.0 || B.radius <= 0.0)
        throw std::invalid_argument("gagliardo_local: arc radii must be positive");
    HalfOffsetWorkspace ws(g);
    Field uh = apply_circulant(u, ws.half_shift);
    const double h = g.h();

    std::vector<char> in_A(static_cast<size_t>(g.M));
    std::vector<char> in_B(static_cast<size_t>(g.M)); // indexed by half node
    for (int j = 0; j < g.M; ++j) {
        in_A[j] = chordal_distance(g.node(j), A.center) <= A.radius;
        in_B[j] = chordal_distance(g.half_node(j), B.center) <= B.radius;
    }

    std::vector<double> row(static_cast<size_t>(g.M), 0.0);
    parallel_for(g.M, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            if (!in_A[i]) continue;
            double acc = 0.0;
            for (int m = 0; m < g.M; ++m) {
                const int im = i + m < g.M ? i + m : i + m - g.M;
                if (!in_B[im]) continue;
                double sq = 0.0;
                for (int c = 0; c < u.n; ++c) {
                    const double d = u.at(i, c) - uh.at(im, c);
                    sq += d * d;
                }
                acc += sq / (ws.dist[m] * ws.dist[m]);
            }
            row[i] = acc;
        }
    });
    double total = 0.0;
    for (int i = 0; i < g.M; ++i) total += row[i];
    return h * h * total;
}

} // namespace halfflow
