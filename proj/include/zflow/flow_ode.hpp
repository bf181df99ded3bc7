#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zflow/dirichlet.hpp"

namespace zflow {

struct FlowConfig {
    int lambda = 1;
    LFunction nonlinearity = LFunction::zeta();
    double rtol = 1e-9;
    double atol = 1e-10;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.5;
    double t_end = 50.0;
    double pole_guard_eps = 1e-3;

    void validate() const;
    Complex field(Complex s) const { return static_cast<double>(lambda) * nonlinearity(s); }
};

/// P(s) = |Re s - 1| + |Im s|.
inline double pole_distance(Complex s) noexcept { return std::abs(s.real() - 1.0) + std::abs(s.imag()); }

enum class ZeroKind { sink, source, trivial_sink, trivial_source };
std::string to_string(ZeroKind kind);

struct ZeroRecord {
    Complex location;
    double deriv_re = 0.0;
    double deriv_im = 0.0;
    ZeroKind kind = ZeroKind::source;
    double residual = 0.0;

    bool attracting() const noexcept { return kind == ZeroKind::sink || kind == ZeroKind::trivial_sink; }
    bool trivial() const noexcept { return kind == ZeroKind::trivial_sink || kind == ZeroKind::trivial_source; }
};

enum class FlowTermination { completed, pole_proximity, norm_escape, converged };
std::string to_string(FlowTermination reason);

struct FlowPoint {
    double t;
    Complex s;
};

struct FlowResult {
    std::vector<FlowPoint> trajectory;
    FlowTermination termination = FlowTermination::completed;
    int accepted_steps = 0;
    int rejected_steps = 0;
    std::optional<ZeroRecord> limit;  ///< nearest classified zero within 0.1 when converged

    const FlowPoint& final() const { return trajectory.back(); }
};

/// Dormand-Prince 5(4) with PI step control for s' = lambda F(s).
FlowResult integrate_flow(const FlowConfig& cfg, Complex s0);

/// Newton-refines z0 and classifies it by the sign of Re F'(z0). Trivial kinds apply to zeta only.
ZeroRecord classify_zero(Complex z0, const LFunction& F = LFunction::zeta());

struct ZeroSearch {
    std::vector<ZeroRecord> zeros;
    std::vector<std::string> warnings;
};

inline constexpr double kMaxCriticalHeight = 300.0;

/// Zeros of zeta on 1/2 + it, 0 < t <= t_max: scan |zeta| on a 0.05 grid, Newton from local minima below 0.5.
ZeroSearch find_critical_zeros(double t_max, const EvalConfig& cfg = {});

/// Number of zeros of zeta inside [sigma_lo, sigma_hi] x [t_lo, t_hi] from the winding of zeta'/zeta,
/// trapezoid rule with spacing h on each edge.
double argument_principle_count(double sigma_lo, double sigma_hi, double t_lo, double t_hi, double h = 0.01,
                                const EvalConfig& cfg = {});

/// Running sink fraction P_n over zeros sorted by height.
std::vector<std::pair<int, double>> sink_proportion(const std::vector<ZeroRecord>& zeros);

}  // namespace zflow
