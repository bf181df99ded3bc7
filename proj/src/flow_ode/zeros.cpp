#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zflow/flow_ode.hpp"

namespace zflow {

namespace {

constexpr double kScanStep = 0.05;
constexpr double kSeedCeiling = 0.5;
constexpr double kNewtonTarget = 1e-9;
constexpr double kDedupe = 1e-4;

bool near_trivial_zero(Complex z) {
    if (std::abs(z.imag()) >= 1e-8 || z.real() > -1.0) return false;
    const double k = std::round(z.real() / 2.0);
    return std::abs(z.real() - 2.0 * k) < 1e-6;
}

std::optional<Complex> newton_on_seed(Complex z, const EvalConfig& cfg) {
    Complex v = riemann_zeta(z, cfg);
    for (int it = 0; it < 40 && std::abs(v) >= kNewtonTarget; ++it) {
        const Complex step = v / riemann_zeta_deriv(z, cfg);
        if (!is_finite(step) || std::abs(step) > 1.0) return std::nullopt;
        z -= step;
        v = riemann_zeta(z, cfg);
    }
    if (std::abs(v) >= kNewtonTarget) return std::nullopt;
    return z;
}

}  // namespace

std::string to_string(ZeroKind kind) {
    switch (kind) {
        case ZeroKind::sink: return "sink";
        case ZeroKind::source: return "source";
        case ZeroKind::trivial_sink: return "trivial_sink";
        case ZeroKind::trivial_source: return "trivial_source";
    }
    return "unknown";
}

ZeroRecord classify_zero(Complex z0, const LFunction& F) {
    Complex v = F(z0);
    if (!(std::abs(v) < 1e-6)) throw DomainError("classify_zero needs |F(z0)| < 1e-6");
    Complex z = z0;
    Complex d = F.derivative(z);
    for (int it = 0; it < 6 && std::abs(v) > 1e-13; ++it) {
        const Complex next = z - v / d;
        const Complex v_next = F(next);
        if (!(std::abs(v_next) < std::abs(v))) break;
        z = next;
        v = v_next;
        d = F.derivative(z);
    }
    if (!(std::abs(v) < 1e-8)) throw AccuracyError("zero refinement did not reach residual 1e-8", z, std::abs(v));
    if (std::abs(d.real()) < 1e-10) throw DegenerateZeroError("Re F'(z0) too small to classify the zero");

    ZeroRecord rec;
    rec.location = z;
    rec.deriv_re = d.real();
    rec.deriv_im = d.imag();
    rec.residual = std::abs(v);
    const bool sink = d.real() < 0.0;
    if (F.period() == 1 && near_trivial_zero(z))
        rec.kind = sink ? ZeroKind::trivial_sink : ZeroKind::trivial_source;
    else
        rec.kind = sink ? ZeroKind::sink : ZeroKind::source;
    return rec;
}

ZeroSearch find_critical_zeros(double t_max, const EvalConfig& cfg) {
    if (!(t_max >= 0.0) || t_max > kMaxCriticalHeight) throw ConfigError("t_max must lie in [0, 300]");
    ZeroSearch out;
    const int n = static_cast<int>(std::floor(t_max / kScanStep + 1e-9));
    if (n < 1) return out;

    std::vector<double> mag(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) mag[i] = std::abs(riemann_zeta({0.5, i * kScanStep}, cfg));

    std::vector<ZeroRecord> found;
    for (int i = 1; i <= n; ++i) {
        const bool left_ok = mag[i] <= mag[i - 1];
        const bool right_ok = i == n || mag[i] <= mag[i + 1];
        if (!left_ok || !right_ok || mag[i] >= kSeedCeiling) continue;
        const double t_seed = i * kScanStep;
        const auto z = newton_on_seed({0.5, t_seed}, cfg);
        if (!z) {
            std::ostringstream os;
            os << "Newton diverged from seed t = " << t_seed;
            out.warnings.push_back(os.str());
            continue;
        }
        if (z->imag() <= 0.0 || z->imag() > t_max) continue;
        try {
            found.push_back(classify_zero(*z, LFunction::zeta(cfg)));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "seed t = " << t_seed << " skipped: " << e.what();
            out.warnings.push_back(os.str());
        }
    }
    std::sort(found.begin(), found.end(),
              [](const ZeroRecord& a, const ZeroRecord& b) { return a.location.imag() < b.location.imag(); });
    for (const auto& rec : found) {
        if (!out.zeros.empty() && std::abs(out.zeros.back().location - rec.location) < kDedupe) continue;
        out.zeros.push_back(rec);
    }
    return out;
}

double argument_principle_count(double sigma_lo, double sigma_hi, double t_lo, double t_hi, double h,
                                const EvalConfig& cfg) {
    if (!(sigma_lo < sigma_hi) || !(t_lo < t_hi) || !(h > 0.0)) throw ConfigError("degenerate counting box");
    if (sigma_lo <= 1.0 && 1.0 <= sigma_hi && t_lo <= 0.0 && 0.0 <= t_hi)
        throw DomainError("counting box must exclude the pole at s = 1");

    const auto log_deriv = [&](Complex s) { return riemann_zeta_deriv(s, cfg) / riemann_zeta(s, cfg); };
    const auto edge = [&](Complex a, Complex b) {
        const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h)));
        const Complex ds = (b - a) / static_cast<double>(n);
        Complex acc = 0.5 * (log_deriv(a) + log_deriv(b));
        for (int i = 1; i < n; ++i) acc += log_deriv(a + static_cast<double>(i) * ds);
        return acc * ds;
    };
    const Complex c00{sigma_lo, t_lo}, c10{sigma_hi, t_lo}, c11{sigma_hi, t_hi}, c01{sigma_lo, t_hi};
    const Complex total = edge(c00, c10) + edge(c10, c11) + edge(c11, c01) + edge(c01, c00);
    return (total / Complex{0.0, 2.0 * std::numbers::pi}).real();
}

std::vector<std::pair<int, double>> sink_proportion(const std::vector<ZeroRecord>& zeros) {
    std::vector<std::pair<int, double>> out;
    out.reserve(zeros.size());
    int sinks = 0;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (zeros[i].attracting()) ++sinks;
        const int n = static_cast<int>(i + 1);
        out.emplace_back(n, static_cast<double>(sinks) / n);
    }
    return out;
}

}  // namespace zflow
