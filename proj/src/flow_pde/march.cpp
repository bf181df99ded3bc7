#include <algorithm>
#include <cmath>

#include "spectral.hpp"

namespace zflow {

namespace {

// P at the point of segment [a, b] closest to s = 1.
double segment_pole_distance(Complex a, Complex b) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    double tau = len2 > 0.0 ? ((Complex{1.0, 0.0} - a) * std::conj(d)).real() / len2 : 0.0;
    tau = std::clamp(tau, 0.0, 1.0);
    return pole_distance(a + tau * d);
}

bool all_finite(const std::vector<Complex>& v) {
    return std::all_of(v.begin(), v.end(), [](Complex z) { return is_finite(z); });
}

}  // namespace

std::string to_string(PdeTermination reason) {
    switch (reason) {
        case PdeTermination::completed: return "completed";
        case PdeTermination::quenched: return "quenched";
        case PdeTermination::escaped: return "escaped";
        case PdeTermination::converged: return "converged";
    }
    return "unknown";
}

GridField etd_step(const GridField& field, double dt, const FlowConfig& cfg) {
    if (!(dt > 0.0)) throw DomainError("etd_step needs dt > 0");
    field.validate();
    cfg.validate();
    detail::Spectral sp(field);
    detail::EtdMultipliers mult;
    mult.prepare(sp.symbol(), dt);
    GridField out = field;
    detail::etd_advance(sp, mult, cfg, out.values);
    if (!all_finite(out.values)) throw FieldFailure("non-finite field after ETD step", field);
    out.time = field.time + dt;
    return out;
}

RunRecord integrate_pde(const GridField& g, const FlowConfig& cfg, const PdeOptions& options) {
    g.validate();
    cfg.validate();
    if (!(options.dt > 0.0)) throw ConfigError("PDE time step must be positive");
    const bool guard = cfg.nonlinearity.has_pole();
    if (guard && !(min_pole_distance(g) > 0.0)) throw DomainError("initial datum touches the pole: inf P(g) = 0");

    RunRecord rec;
    rec.cfg = cfg;
    rec.options = options;
    const int cadence = options.snapshot_every > 0
                            ? options.snapshot_every
                            : std::max(1, static_cast<int>(std::floor(cfg.t_end / options.dt / 200.0)));

    GridField u = g;
    u.time = 0.0;
    rec.snapshots.push_back(u);
    rec.monitors.push_back(sample_monitors(u, options.target));

    const auto stop_reason = [&](const MonitorSample& m) -> std::optional<PdeTermination> {
        if (guard && m.min_p < cfg.pole_guard_eps) return PdeTermination::quenched;
        if (m.sup_abs > options.escape_norm) return PdeTermination::escaped;
        if (options.target && m.target_dist < options.target_tol) return PdeTermination::converged;
        return std::nullopt;
    };
    const auto argmin_p = [](const GridField& f) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < f.size(); ++i)
            if (pole_distance(f.values[i]) < pole_distance(f.values[best])) best = i;
        return best;
    };

    if (auto r = stop_reason(rec.monitors.back())) {
        rec.termination = *r;
        if (*r == PdeTermination::quenched) rec.quench_index = argmin_p(u);
        rec.final_dt = options.dt;
        return rec;
    }

    detail::Spectral sp(g);
    detail::EtdMultipliers mult;
    double dt = options.dt;
    long step = 0;
    std::vector<Complex> next, stage;
    while (u.time < cfg.t_end) {
        const double remaining = cfg.t_end - u.time;
        const bool last = dt >= remaining * (1.0 - 1e-12);
        const double h = last ? remaining : dt;
        mult.prepare(sp.symbol(), h);
        next = u.values;
        bool retry = false;
        try {
            detail::etd_advance(sp, mult, cfg, next, &stage);
        } catch (const QuenchSignal& q) {
            if (rec.halvings >= options.max_halvings) {
                rec.termination = PdeTermination::quenched;
                rec.quench_index = q.index();
                break;
            }
            retry = true;
        }
        if (!retry && guard) {
            for (std::size_t i = 0; i < next.size(); ++i) {
                // the pole was passed inside the step without landing in the guard
                const bool passed = segment_pole_distance(u.values[i], stage[i]) < cfg.pole_guard_eps ||
                                    segment_pole_distance(stage[i], next[i]) < cfg.pole_guard_eps;
                if (pole_distance(next[i]) >= cfg.pole_guard_eps && passed &&
                    rec.halvings < options.max_halvings) {
                    retry = true;
                    break;
                }
            }
        }
        if (retry) {
            dt = 0.5 * h;
            ++rec.halvings;
            continue;
        }
        if (!all_finite(next)) throw FieldFailure("non-finite field during PDE march", u);

        u.values.swap(next);
        u.time = last ? cfg.t_end : u.time + h;
        ++step;
        rec.monitors.push_back(sample_monitors(u, options.target));
        if (auto r = stop_reason(rec.monitors.back())) {
            rec.termination = *r;
            if (*r == PdeTermination::quenched) rec.quench_index = argmin_p(u);
            break;
        }
        if (step % cadence == 0) rec.snapshots.push_back(u);
    }
    if (rec.snapshots.back().time != u.time) rec.snapshots.push_back(u);
    rec.final_dt = dt;
    return rec;
}

double self_convergence_estimate(const GridField& g, const FlowConfig& cfg, double dt) {
    PdeOptions coarse;
    coarse.dt = dt;
    coarse.snapshot_every = 1 << 30;
    coarse.max_halvings = 0;
    PdeOptions fine = coarse;
    fine.dt = 0.5 * dt;
    const auto a = integrate_pde(g, cfg, coarse);
    const auto b = integrate_pde(g, cfg, fine);
    if (a.termination != PdeTermination::completed || b.termination != PdeTermination::completed)
        throw NumericalError("self-convergence estimate needs runs that complete");
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        diff = std::max(diff, std::abs(a.final_field().values[i] - b.final_field().values[i]));
    // second order: error(dt) ~ 4/3 |u_dt - u_{dt/2}|
    return diff * 4.0 / 3.0;
}

}  // namespace zflow
