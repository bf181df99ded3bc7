#include <algorithm>
#include <array>
#include <cmath>

#include "zflow/flow_ode.hpp"

namespace zflow {

namespace {

// Dormand-Prince 5(4)
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kBhat{5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                      -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

constexpr double kEscapeNorm = 1e6;
constexpr int kConvergedRun = 10;

}  // namespace

std::string to_string(FlowTermination reason) {
    switch (reason) {
        case FlowTermination::completed: return "completed";
        case FlowTermination::pole_proximity: return "pole_proximity";
        case FlowTermination::norm_escape: return "norm_escape";
        case FlowTermination::converged: return "converged";
    }
    return "unknown";
}

void FlowConfig::validate() const {
    if (lambda != 1 && lambda != -1) throw ConfigError("lambda must be +1 or -1");
    if (!(pole_guard_eps > 0.0)) throw ConfigError("pole_guard_eps must be positive");
    if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
        throw ConfigError("step bounds must satisfy 0 < dt_min <= dt_init <= dt_max");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and non-negative");
}

FlowResult integrate_flow(const FlowConfig& cfg, Complex s0) {
    cfg.validate();
    if (!is_finite(s0)) throw DomainError("initial point must be finite");
    const bool guard = cfg.nonlinearity.has_pole();
    if (guard && pole_distance(s0) <= cfg.pole_guard_eps)
        throw DomainError("initial point lies inside the pole guard");

    FlowResult out;
    out.trajectory.push_back({0.0, s0});
    double t = 0.0;
    Complex s = s0;
    Complex k1 = cfg.field(s);
    double dt = cfg.dt_init;
    double prev_err = 1.0;
    int small_run = std::abs(k1) < cfg.atol ? 1 : 0;
    std::array<Complex, 7> k{};

    while (t < cfg.t_end) {
        const double h = std::min(dt, cfg.t_end - t);
        k[0] = k1;
        Complex s_new;
        bool stage_failed = false;
        try {
            for (int i = 1; i < 7; ++i) {
                Complex acc{0.0, 0.0};
                for (int j = 0; j < i; ++j) acc += kA[i][j] * k[j];
                const Complex y = s + h * acc;
                if (i == 6) s_new = y;
                k[i] = cfg.field(y);
            }
        } catch (const PoleError&) {
            stage_failed = true;
        }

        double err = 0.0;
        if (!stage_failed) {
            Complex e{0.0, 0.0};
            for (int i = 0; i < 7; ++i) e += (kB[i] - kBhat[i]) * k[i];
            const double scale = cfg.atol + cfg.rtol * std::max(std::abs(s), std::abs(s_new));
            err = std::abs(h * e) / scale;
            if (!std::isfinite(err)) stage_failed = true;
        }

        if (stage_failed || err > 1.0) {
            ++out.rejected_steps;
            dt = stage_failed ? 0.5 * h : h * std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (dt < cfg.dt_min) throw StiffnessError("step size fell below dt_min", t, s);
            continue;
        }

        t = (h == cfg.t_end - t) ? cfg.t_end : t + h;
        s = s_new;
        k1 = k[6];
        ++out.accepted_steps;
        out.trajectory.push_back({t, s});

        // PI controller
        const double e_now = std::max(err, 1e-10);
        const double factor = 0.9 * std::pow(e_now, -0.7 / 5.0) * std::pow(prev_err, 0.4 / 5.0);
        prev_err = e_now;
        dt = std::clamp(h * std::clamp(factor, 0.2, 5.0), cfg.dt_min, cfg.dt_max);

        if (guard && pole_distance(s) < cfg.pole_guard_eps) {
            out.termination = FlowTermination::pole_proximity;
            return out;
        }
        if (std::abs(s) > kEscapeNorm) {
            out.termination = FlowTermination::norm_escape;
            return out;
        }
        small_run = std::abs(k1) < cfg.atol ? small_run + 1 : 0;
        if (small_run >= kConvergedRun) {
            out.termination = FlowTermination::converged;
            try {
                const ZeroRecord z = classify_zero(s, cfg.nonlinearity);
                if (std::abs(z.location - s) < 0.1) out.limit = z;
            } catch (const Error&) {
            }
            return out;
        }
    }
    return out;
}

}  // namespace zflow
