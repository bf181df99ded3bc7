#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "zflow/flow_pde.hpp"

namespace zflow {

namespace {

constexpr double kAsymptoticTol = 1e-3;

// n with x in (-4n, -4n + 4), n >= 1; 0 when x sits on a cell boundary or right of 4.
int cell_index(double x) {
    const double q = 1.0 - x / 4.0;
    const double n = std::floor(q);
    if (n < 1.0 || q == n) return 0;
    return static_cast<int>(n);
}

}  // namespace

EnvelopeSpec envelope_spec_from(const GridField& g) {
    EnvelopeSpec spec;
    spec.i1 = spec.i2 = std::numeric_limits<double>::infinity();
    spec.s1 = spec.s2 = -std::numeric_limits<double>::infinity();
    spec.real_datum = true;
    for (const auto& v : g.values) {
        spec.i1 = std::min(spec.i1, v.real());
        spec.s1 = std::max(spec.s1, v.real());
        spec.i2 = std::min(spec.i2, v.imag());
        spec.s2 = std::max(spec.s2, v.imag());
        if (v.imag() != 0.0) spec.real_datum = false;
    }
    spec.i = spec.i1;
    spec.s = spec.s1;
    spec.k1 = std::max(1, static_cast<int>(std::ceil(-spec.i / 2.0)));
    spec.k2 = spec.s <= -2.0 ? static_cast<int>(std::floor(-spec.s / 2.0)) : 0;
    spec.n1 = cell_index(spec.i);
    spec.n2 = cell_index(spec.s);
    return spec;
}

Theorem parse_theorem(const std::string& id) {
    if (id == "thm1.5") return Theorem::thm1_5;
    if (id == "cor1.6") return Theorem::cor1_6;
    if (id == "thm1.7i") return Theorem::thm1_7i;
    if (id == "thm1.7ii") return Theorem::thm1_7ii;
    if (id == "thm1.7iii") return Theorem::thm1_7iii;
    throw ConfigError("unknown envelope theorem id: " + id);
}

std::string to_string(Theorem theorem) {
    switch (theorem) {
        case Theorem::thm1_5: return "thm1.5";
        case Theorem::cor1_6: return "cor1.6";
        case Theorem::thm1_7i: return "thm1.7i";
        case Theorem::thm1_7ii: return "thm1.7ii";
        case Theorem::thm1_7iii: return "thm1.7iii";
    }
    return "unknown";
}

EnvelopeReport envelope_check(const RunRecord& run, const EnvelopeSpec& spec, Theorem theorem,
                              double discretization_error) {
    const auto& cfg = run.cfg;
    const auto& L = cfg.nonlinearity;
    if (cfg.lambda != 1) throw ConfigError("envelope checks assume lambda = +1");
    const bool is_zeta = L.period() == 1;

    EnvelopeReport rep;
    rep.slack = 1e-6 + 10.0 * discretization_error;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    // margin(t, u) returns the smallest signed distance of u to the bounds at time t
    std::function<double(double, Complex)> margin;
    bool final_only = false;
    std::ostringstream detail;

    switch (theorem) {
        case Theorem::thm1_5:
        case Theorem::cor1_6: {
            // sigma1 >= sigma0(L_m), so I1 > sigma1 certifies I1 > max{1, sigma0}
            const double s1 = sigma1_root(L.eval_config());
            if (!(spec.i1 > s1)) throw ConfigError("hypothesis I1 > max{1, sigma0} not certified (need I1 > sigma1)");
            if (theorem == Theorem::thm1_5 && !L.character().is_principal())
                throw ConfigError("thm1.5 needs a principal character");
            if (theorem == Theorem::cor1_6 && !L.character().is_real())
                throw ConfigError("cor1.6 needs a real character");
            if (theorem == Theorem::cor1_6 && !(spec.i2 > 0.0)) throw ConfigError("cor1.6 needs I2 > 0");
            const double z = riemann_zeta({spec.i1, 0.0}, L.eval_config()).real();
            const bool corollary = theorem == Theorem::cor1_6;
            margin = [=](double t, Complex u) {
                const double lo1 = std::max(0.0, 2.0 - z) * t + spec.i1;
                const double hi1 = z * t + spec.s1;
                const double lo2 = corollary ? 0.0 : (1.0 - z) * t + spec.i2;
                const double hi2 = (z - 1.0) * t + spec.s2;
                return std::min({u.real() - lo1, hi1 - u.real(), u.imag() - lo2, hi2 - u.imag()});
            };
            detail << "slopes re [" << std::max(0.0, 2.0 - z) << ", " << z << "], im ["
                   << (corollary ? 0.0 : 1.0 - z) << ", " << z - 1.0 << "]";
            break;
        }
        case Theorem::thm1_7i: {
            if (!is_zeta || !spec.real_datum) throw ConfigError("thm1.7i needs zeta and a real datum");
            if (!(spec.i > 1.0)) throw ConfigError("thm1.7i needs I > 1");
            const double z = riemann_zeta({spec.i, 0.0}, L.eval_config()).real();
            margin = [=](double t, Complex u) {
                return std::min({u.real() - (t + spec.i), z * t + spec.s - u.real(), -std::abs(u.imag())});
            };
            detail << "t + " << spec.i << " <= u <= " << z << " t + " << spec.s;
            break;
        }
        case Theorem::thm1_7ii: {
            if (!is_zeta || !spec.real_datum) throw ConfigError("thm1.7ii needs zeta and a real datum");
            if (!(spec.i < 1.0)) throw ConfigError("thm1.7ii needs I < 1");
            if (!(spec.s < 1.0)) throw ConfigError("thm1.7ii needs inf |g - 1| > 0 with I < 1 (S < 1)");
            const double lo = -2.0 * spec.k1;
            const double hi = spec.k2 > 0 ? -2.0 * spec.k2 : spec.s;
            margin = [=](double, Complex u) { return std::min({u.real() - lo, hi - u.real(), -std::abs(u.imag())}); };
            detail << lo << " <= u <= " << hi;
            break;
        }
        case Theorem::thm1_7iii: {
            if (!is_zeta || !spec.real_datum) throw ConfigError("thm1.7iii needs zeta and a real datum");
            if (!(spec.s < 1.0)) throw ConfigError("thm1.7iii needs I < 1 and S < 1");
            if (spec.n1 == 0 || spec.n2 == 0) throw ConfigError("thm1.7iii needs I, S strictly inside cells (-4n, -4n+4)");
            const double lo = -4.0 * spec.n1 + 2.0;
            const double hi = -4.0 * spec.n2 + 2.0;
            final_only = true;
            margin = [=](double, Complex u) {
                return std::min({u.real() - lo, hi - u.real()}) + kAsymptoticTol - std::abs(u.imag());
            };
            detail << "final field within " << kAsymptoticTol << " of [" << lo << ", " << hi << "]";
            break;
        }
    }

    const std::size_t first = final_only ? run.snapshots.size() - 1 : 0;
    for (std::size_t j = first; j < run.snapshots.size(); ++j) {
        const auto& snap = run.snapshots[j];
        for (const auto& v : snap.values) {
            const double m = margin(snap.time, v);
            if (m < rep.worst_margin) {
                rep.worst_margin = m;
                rep.worst_t = snap.time;
            }
        }
    }
    rep.pass = rep.worst_margin >= -rep.slack;
    rep.detail = detail.str();
    return rep;
}

StabilityReport stability_experiment(const ZeroRecord& z0, double delta, const GridField& datum, const FlowConfig& cfg,
                                     const StabilityOptions& options) {
    if (!z0.attracting()) throw ConfigError("stability experiment needs a sink");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    for (const auto& v : datum.values)
        if (!(std::abs(v - z0.location) < delta)) throw ConfigError("datum leaves the disc D(z0, delta)");

    FlowConfig run_cfg = cfg;
    run_cfg.t_end = options.t_end;
    PdeOptions opts;
    opts.dt = options.dt;
    opts.snapshot_every = 1 << 30;
    opts.target = z0.location;
    opts.target_tol = options.tol;
    const auto run = integrate_pde(datum, run_cfg, opts);

    StabilityReport rep;
    rep.converged = run.termination == PdeTermination::converged;
    rep.convergence_time = rep.converged ? run.monitors.back().t : std::numeric_limits<double>::quiet_NaN();
    rep.final_sup = run.monitors.back().target_dist;
    bool inside = false;
    for (std::size_t i = 0; i < run.monitors.size(); ++i) {
        const auto& m = run.monitors[i];
        rep.sup_history.emplace_back(m.t, m.target_dist);
        if (m.target_dist >= 2.0 * delta) rep.escaped = true;
        if (i > 0 && m.t > options.transient &&
            m.target_dist > run.monitors[i - 1].target_dist * (1.0 + 1e-9) + 1e-15)
            rep.monotone_after_transient = false;
        const double radius = delta * std::exp(-m.t * delta * delta / 2.0);
        if (!inside && m.target_dist <= radius) inside = true;
        if (inside && m.target_dist > radius * (1.0 + 1e-9)) rep.disc_contained = false;
    }
    return rep;
}

}  // namespace zflow
