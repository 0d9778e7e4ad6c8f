#include "halfflow/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "halfflow/bubbling.hpp"
#include "halfflow/fft.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double pi = 3.14159265358979323846;

double phi1(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

bool all_finite(const Field& u) {
    for (double v : u.values)
        if (!std::isfinite(v)) return false;
    return true;
}

// Running per-radius sup of the local energy profile; the halt fires
// once every radius has reached eps1 somewhere in (x, t).
struct ConcentrationMonitor {
    std::vector<double> radii;
    double eps1 = 0.0;
    std::vector<double> running_sup;

    ConcentrationMonitor(const std::vector<double>& r, double level)
        : radii(r), eps1(level), running_sup(r.size(), 0.0) {}

    bool active() const { return !radii.empty(); }

    bool update(const Field& u) {
        if (!active()) return false;
        Field qd = quarter_density(u);
        bool all = true;
        for (size_t i = 0; i < radii.size(); ++i) {
            const std::vector<double> profile = local_energy_profile(qd, radii[i]);
            for (double e : profile)
                if (e > running_sup[i]) running_sup[i] = e;
            all = all && running_sup[i] >= eps1;
        }
        return all;
    }
};

} // namespace

const char* to_string(TerminalStatus s) {
    switch (s) {
    case TerminalStatus::completed: return "completed";
    case TerminalStatus::concentration_detected: return "concentration_detected";
    case TerminalStatus::diverged: return "diverged";
    }
    return "unknown";
}

Field rhs(const Field& u, const CalibrationRecord& calib) {
    if (u.circle().M != calib.M)
        throw std::invalid_argument("rhs: calibration record is for a different grid");
    Field density = sq_grad_density(u);
    Field out(u.circle(), u.n);
    for (int j = 0; j < u.circle().M; ++j)
        for (int c = 0; c < u.n; ++c)
            out.at(j, c) = calib.nonlinearity_factor * u.at(j, c) * density.at(j, 0);
    return out;
}

FlowStepper::FlowStepper(const CircleGrid& g, double step_dt,
                         const CalibrationRecord& record, bool with_nonlinearity)
    : grid(g), dt(step_dt), calib(record), nonlinearity(with_nonlinearity) {
    if (!(dt > 0.0)) throw std::invalid_argument("FlowStepper: dt must be positive");
    if (calib.M != g.M)
        throw std::invalid_argument("FlowStepper: calibration record grid mismatch");
    std::vector<double> s1(static_cast<size_t>(g.M)), s2(static_cast<size_t>(g.M));
    for (int i = 0; i < g.M; ++i) {
        const double ak = std::abs(static_cast<double>(index_to_wavenumber(i, g.M)));
        s1[i] = std::exp(-dt * ak);
        s2[i] = phi1(-dt * ak);
    }
    K1 = kernel_from_real_symbol(g, s1);
    K2 = kernel_from_real_symbol(g, s2);
}

Field FlowStepper::step_with_source(const Field& u, const Field& source) const {
    Field lin = apply_circulant(u, K1);
    Field forced = apply_circulant(source, K2);
    for (size_t i = 0; i < lin.values.size(); ++i)
        lin.values[i] += dt * forced.values[i];
    return lin;
}

Field FlowStepper::step(const Field& u) const {
    if (!nonlinearity) return apply_circulant(u, K1);
    return step_with_source(u, rhs(u, calib));
}

Field exp_euler_step(const Field& u, double dt, const CalibrationRecord& calib,
                     bool reproject_after, bool nonlinearity) {
    FlowStepper stepper(u.circle(), dt, calib, nonlinearity);
    Field out = stepper.step(u);
    return reproject_after ? reproject(out) : out;
}

PicardResult picard_slab(const Field& u0, double T_slab, const FlowConfig& cfg) {
    if (!(T_slab > 0.0)) throw std::invalid_argument("picard_slab: slab length must be positive");
    if (!(cfg.picard_tol > 0.0)) throw std::invalid_argument("picard_slab: tolerance must be positive");
    if (!cfg.calibration)
        throw std::runtime_error("picard_slab: missing calibration record");

    const int steps = std::max(1, static_cast<int>(std::lround(T_slab / cfg.dt)));
    const double dt = T_slab / steps;
    FlowStepper stepper(u0.circle(), dt, *cfg.calibration, cfg.nonlinearity);

    PicardResult res;
    res.trajectory.assign(static_cast<size_t>(steps) + 1, u0);
    res.times.resize(static_cast<size_t>(steps) + 1);
    for (int m = 0; m <= steps; ++m) res.times[m] = m * dt;

    for (int it = 1; it <= cfg.picard_max_iters; ++it) {
        std::vector<Field> next(res.trajectory.size(), u0);
        for (int m = 0; m < steps; ++m) {
            const Field source = cfg.nonlinearity
                                     ? rhs(res.trajectory[m], *cfg.calibration)
                                     : Field(u0.circle(), u0.n);
            next[m + 1] = stepper.step_with_source(next[m], source);
        }
        double diff = 0.0;
        for (size_t m = 0; m < next.size(); ++m) {
            Field d = next[m];
            for (size_t i = 0; i < d.values.size(); ++i)
                d.values[i] -= res.trajectory[m].values[i];
            diff = std::max(diff, sobolev_norm(d, 1.0, false));
        }
        if (!res.diffs.empty())
            res.ratios.push_back(diff / res.diffs.back());
        res.diffs.push_back(diff);
        res.trajectory = std::move(next);
        res.iterations = it;
        if (diff <= cfg.picard_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

FlowTrace run_flow(const Field& u0, const FlowConfig& cfg) {
    if (!(cfg.dt > 0.0 && cfg.t_end > 0.0))
        throw std::invalid_argument("run_flow: dt and t_end must be positive");
    if (!cfg.calibration)
        throw std::runtime_error("run_flow: missing calibration record");
    if (u0.max_sphere_defect() > 1e-6)
        throw std::invalid_argument("run_flow: initial data is not on the sphere");
    const CalibrationRecord& calib = *cfg.calibration;
    const int stride = std::max(1, cfg.snapshot_stride);

    FlowTrace trace;
    ConcentrationMonitor monitor(cfg.scan_radii, cfg.thresholds.eps1);

    double prev_energy = 0.0;
    const auto record = [&](double t, const Field& u, double dtu_l2, bool force_snapshot) {
        const double energy = half_energy(u);
        const double drift = u.max_sphere_defect();
        trace.steps.push_back({t, energy, dtu_l2, drift, u.max_norm()});
        const size_t step_index = trace.steps.size() - 1;
        bool concentrated = false;
        if (step_index % static_cast<size_t>(stride) == 0 || force_snapshot) {
            trace.snapshots.push_back({t, u, energy, dtu_l2, drift});
            concentrated = monitor.update(u);
        }
        prev_energy = energy;
        return concentrated;
    };

    if (cfg.use_picard) {
        Field u = u0;
        double t = 0.0;
        if (record(t, u, 0.0, true)) {
            trace.status = TerminalStatus::concentration_detected;
            return trace;
        }
        while (t < cfg.t_end - 1e-12 * cfg.t_end) {
            const double T_slab = std::min(cfg.slab_length, cfg.t_end - t);
            PicardResult slab = picard_slab(u, T_slab, cfg);
            if (!slab.converged) {
                std::string ratios;
                for (double r : slab.ratios) ratios += std::to_string(r) + " ";
                throw std::runtime_error(
                    "run_flow: Picard slab failed to contract (ratios: " + ratios +
                    "); shorten slab_length");
            }
            for (size_t m = 1; m < slab.trajectory.size(); ++m) {
                Field um = slab.trajectory[m];
                const bool last_in_slab = m + 1 == slab.trajectory.size();
                if (cfg.reproject && last_in_slab) um = reproject(um);
                const double dt_m = slab.times[m] - slab.times[m - 1];
                const double dtu =
                    l2_distance(um, slab.trajectory[m - 1]) / dt_m;
                const double tm = t + slab.times[m];
                const bool final_state = last_in_slab && tm >= cfg.t_end - 1e-12;
                if (!all_finite(um) || um.max_norm() > 10.0) {
                    trace.status = TerminalStatus::diverged;
                    return trace;
                }
                if (record(tm, um, dtu, final_state)) {
                    trace.status = TerminalStatus::concentration_detected;
                    return trace;
                }
                if (last_in_slab) u = um;
            }
            t += T_slab;
        }
        trace.status = TerminalStatus::completed;
        return trace;
    }

    const int n_steps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
    const double last_dt = cfg.t_end - (n_steps - 1) * cfg.dt;
    FlowStepper stepper(u0.circle(), cfg.dt, calib, cfg.nonlinearity);
    const bool uniform = std::abs(last_dt - cfg.dt) <= 1e-12 * cfg.dt;
    std::optional<FlowStepper> last_stepper;
    if (!uniform) last_stepper.emplace(u0.circle(), last_dt, calib, cfg.nonlinearity);

    Field u = u0;
    if (record(0.0, u, 0.0, true)) {
        trace.status = TerminalStatus::concentration_detected;
        return trace;
    }
    for (int m = 0; m < n_steps; ++m) {
        const bool last = m == n_steps - 1;
        const FlowStepper& s = (last && !uniform) ? *last_stepper : stepper;
        const double step_dt = s.dt;
        const double energy_before = prev_energy;
        Field next = s.step(u);
        if (!all_finite(next)) {
            trace.status = TerminalStatus::diverged;
            return trace;
        }
        if (cfg.reproject) next = reproject(next);
        const double dtu = l2_distance(next, u) / step_dt;
        const double t_next = last ? cfg.t_end : (m + 1) * cfg.dt;
        const bool concentrated = record(t_next, next, dtu, last);
        u = std::move(next);
        if (u.max_norm() > 10.0 ||
            (prev_energy > energy_before * 1.1 && energy_before > 0.0)) {
            trace.status = TerminalStatus::diverged;
            return trace;
        }
        if (concentrated) {
            trace.status = TerminalStatus::concentration_detected;
            return trace;
        }
    }
    trace.status = TerminalStatus::completed;
    return trace;
}

double energy_identity_residual(const FlowTrace& trace) {
    const auto& snaps = trace.snapshots;
    if (snaps.size() < 2)
        throw std::invalid_argument("energy_identity_residual: need at least two snapshots");
    const size_t K = snaps.size();

    std::vector<double> g(K); // ||dt u||_{L2}^2 at each snapshot
    for (size_t i = 0; i < K; ++i) {
        const size_t lo = i == 0 ? 0 : i - 1;
        const size_t hi = i + 1 == K ? i : i + 1;
        const double dt = snaps[hi].t - snaps[lo].t;
        const double d = l2_distance(snaps[hi].u, snaps[lo].u) / dt;
        g[i] = d * d;
    }
    double integral = 0.0;
    for (size_t i = 0; i + 1 < K; ++i)
        integral += 0.5 * (g[i] + g[i + 1]) * (snaps[i + 1].t - snaps[i].t);

    return std::abs(integral + snaps.back().energy - snaps.front().energy);
}

double linear_dissipation(const Field& u0, double T) {
    SpectralField su = to_spectral(u0);
    double total = 0.0;
    for (int c = 0; c < su.n; ++c) {
        for (int i = 0; i < su.grid.M; ++i) {
            const double ak = std::abs(static_cast<double>(su.wavenumber(i)));
            if (ak == 0.0) continue;
            total += ak * std::norm(su.coeffs[c][i]) * -std::expm1(-2.0 * ak * T);
        }
    }
    return pi * total;
}

} // namespace halfflow
