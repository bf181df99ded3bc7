#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "zflow/special_fn.hpp"

namespace zflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRoundoff = 2.2e-16;

// B_{2k} / (2k)! for k = 1..15.
constexpr std::array<double, 15> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
    -23749461029.0 / 870.0 / 3.0488834461171386e29,
    8615841276005.0 / 14322.0 / 2.6525285981219107e32,
};

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

void check_s(Complex s) {
    if (!is_finite(s)) throw DomainError("s must be finite");
}

void check_not_pole(Complex s) {
    if (s == Complex{1.0, 0.0}) throw PoleError("zeta(s, alpha) has a pole at s = 1");
}

constexpr double kSeriesSwitchRadius = 0.5;

// Integrands of h and h' in t. At t = 0 both have finite limits.
struct HermiteIntegrand {
    Complex s;
    double alpha;
    bool derivative;

    Complex operator()(double t) const {
        if (t < 1e-10) {
            const Complex a_pow = std::exp(-s * std::log(alpha));
            if (!derivative) return s * a_pow / (kPi * alpha);
            return (1.0 - s * std::log(alpha)) * a_pow / (kPi * alpha);
        }
        const double omega = std::atan(t / alpha);
        const double log_r = 0.5 * std::log(alpha * alpha + t * t);
        const double denom = std::expm1(2.0 * kPi * t);
        const Complex r_pow = std::exp(-s * log_r);
        const Complex sin_term = std::sin(s * omega);
        if (!derivative) return 2.0 * sin_term * r_pow / denom;
        const Complex cos_term = std::cos(s * omega);
        return 2.0 * (omega * cos_term - log_r * sin_term) * r_pow / denom;
    }
};

// Certified majorant of |integrand| at t, used to place the truncation point.
double hermite_envelope(Complex s, double alpha, double t, bool derivative) {
    const double x = s.real();
    const double y = std::abs(s.imag());
    const double r2 = alpha * alpha + t * t;
    const double log_r = 0.5 * std::log(r2);
    const double radial = std::exp(std::abs(x) * std::abs(log_r));
    const double sine = std::min(1.0, std::abs(s) * kPi / 2.0) * std::cosh(y * kPi / 2.0);
    double env = 2.0 * radial * sine / std::expm1(2.0 * kPi * t);
    if (derivative) env *= (kPi / 2.0 + std::abs(log_r)) * std::max(1.0, 1.0 / std::min(1.0, std::abs(s) * kPi / 2.0 + 1e-300));
    return env;
}

double truncation_point(Complex s, double alpha, double threshold, bool derivative) {
    const double x_abs = std::abs(s.real());
    const double min_t = x_abs / (2.0 * kPi) + 1.0;
    double t = 1.0;
    while (t < 400.0) {
        if (t >= min_t && hermite_envelope(s, alpha, t, derivative) / (2.0 * kPi) < threshold) return t;
        t += 0.5;
    }
    return t;
}

// Size of the largest integrand value relative to O(1): the rounding floor of the Hermite path.
double hermite_cancellation(Complex s, double alpha) {
    const double y = std::abs(s.imag());
    const double t_star = std::sqrt(std::max(y * alpha / (2.0 * kPi) - alpha * alpha, 0.0));
    const double log_c = std::max(0.0, y * std::atan(t_star / alpha) - 2.0 * kPi * t_star);
    const double scale = std::max(1.0, std::pow(alpha, -s.real()));
    return std::exp(log_c) * scale * (1.0 + 0.1 * std::abs(s));
}

struct EmTerms {
    int n_terms;
    double a;
};

EmTerms em_layout(Complex s, double alpha) {
    const double mag = std::abs(s) + 2.0 * static_cast<double>(kBernoulliOverFactorial.size());
    const int n = std::max(4, static_cast<int>(std::ceil(mag / kPi - alpha)));
    return {n, n + alpha};
}

double em_magnitude(Complex s, double alpha) {
    const double x = s.real();
    const auto [n, a] = em_layout(s, alpha);
    double mag = std::pow(alpha, -x);
    if (std::abs(1.0 - x) < 1e-12)
        mag += std::log(a / alpha);
    else
        mag += (std::pow(a, 1.0 - x) - std::pow(alpha, 1.0 - x)) / (1.0 - x);
    return mag;
}

struct EmOutcome {
    Complex regular;  // zeta - 1/(s-1)
    Complex deriv;    // full derivative (only when requested)
    double abs_err;
};

// Euler-Maclaurin: direct sum over n < N plus integral, midpoint and Bernoulli corrections at a = N + alpha.
EmOutcome euler_maclaurin(Complex s, double alpha, bool want_deriv, double abs_tol) {
    const auto [n_terms, a] = em_layout(s, alpha);
    Complex sum{0.0, 0.0};
    Complex dsum{0.0, 0.0};
    double mag = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        const double log_b = std::log(n + alpha);
        const Complex term = std::exp(-s * log_b);
        sum += term;
        mag += std::abs(term);
        if (want_deriv) dsum -= log_b * term;
    }
    const double log_a = std::log(a);
    const Complex a_pow = std::exp(-s * log_a);  // a^{-s}
    const Complex sm1 = s - 1.0;
    Complex regular = sum + (-log_a) * expm1_ratio(-log_a * sm1) + 0.5 * a_pow;
    Complex deriv{0.0, 0.0};
    if (want_deriv) {
        const Complex a_pow1 = a * a_pow;  // a^{1-s}
        deriv = dsum - log_a * a_pow1 / sm1 - a_pow1 / (sm1 * sm1) - 0.5 * log_a * a_pow;
    }

    // Rising factorial P = s (s+1) ... (s+2k-2) and its derivative.
    Complex p = s;
    Complex dp{1.0, 0.0};
    Complex a_shift = a_pow / a;  // a^{-s-1}
    double last = 0.0;
    for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
        const Complex term = kBernoulliOverFactorial[k] * p * a_shift;
        regular += term;
        if (want_deriv) deriv += kBernoulliOverFactorial[k] * (dp - log_a * p) * a_shift;
        last = std::abs(term);
        if (last < 1e-4 * abs_tol) break;
        const Complex f1 = s + static_cast<double>(2 * k + 1);
        const Complex f2 = s + static_cast<double>(2 * k + 2);
        dp = dp * f1 * f2 + p * (f1 + f2);
        p = p * f1 * f2;
        a_shift /= a * a;
    }
    return {regular, deriv, last + 4.0 * kRoundoff * mag};
}

EvalResult hermite_regular(Complex s, double alpha, const EvalConfig& cfg) {
    const EvalResult h = hermite_h_detailed(s, alpha, cfg);
    return {hermite_d(s, alpha) + h.value, h.abs_err, EvalPath::hermite};
}

}  // namespace

void EvalConfig::validate() const {
    if (!(abs_tol > 0.0)) throw ConfigError("abs_tol must be positive");
    if (!(trunc_threshold <= abs_tol / 10.0) || !(trunc_threshold > 0.0))
        throw ConfigError("trunc_threshold must lie in (0, abs_tol/10]");
    if (!(series_cutoff_sigma > 1.0)) throw ConfigError("series_cutoff_sigma must exceed 1");
    if (quad_max_refinements < 1) throw ConfigError("quad_max_refinements must be positive");
}

std::string_view to_string(EvalPath path) {
    switch (path) {
        case EvalPath::hermite: return "hermite";
        case EvalPath::series: return "series";
        case EvalPath::euler_maclaurin: return "euler_maclaurin";
    }
    return "unknown";
}

Complex expm1_ratio(Complex u) {
    if (std::abs(u) < kSeriesSwitchRadius) {
        // sum_k u^k / (k+1)!
        Complex term{1.0, 0.0};
        Complex acc = term;
        for (int k = 1; k < 30; ++k) {
            term *= u / static_cast<double>(k + 1);
            acc += term;
            if (std::abs(term) < 1e-18) break;
        }
        return acc;
    }
    return (std::exp(u) - 1.0) / u;
}

Complex expm1_ratio_deriv(Complex u) {
    if (std::abs(u) < kSeriesSwitchRadius) {
        // sum_{k>=1} k u^{k-1} / (k+1)!
        Complex power{1.0, 0.0};
        double fact = 2.0;
        Complex acc{0.0, 0.0};
        for (int k = 1; k < 30; ++k) {
            const Complex term = static_cast<double>(k) * power / fact;
            acc += term;
            if (std::abs(term) < 1e-18) break;
            power *= u;
            fact *= static_cast<double>(k + 2);
        }
        return acc;
    }
    return (std::exp(u) * (u - 1.0) + 1.0) / (u * u);
}

Complex hermite_d(Complex s, double alpha) {
    check_alpha(alpha);
    check_s(s);
    const double log_inv = -std::log(alpha);
    return log_inv * expm1_ratio(log_inv * (s - 1.0)) + 0.5 * std::exp(-s * std::log(alpha));
}

Complex hermite_d_deriv(Complex s, double alpha) {
    check_alpha(alpha);
    check_s(s);
    const double log_inv = -std::log(alpha);
    return log_inv * log_inv * expm1_ratio_deriv(log_inv * (s - 1.0)) +
           0.5 * log_inv * std::exp(-s * std::log(alpha));
}

EvalResult hermite_h_detailed(Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    cfg.validate();
    if (s == Complex{0.0, 0.0}) return {{0.0, 0.0}, 0.0, EvalPath::hermite};
    const double upper = truncation_point(s, alpha, cfg.trunc_threshold, false);
    const auto q = detail::adaptive_gl(HermiteIntegrand{s, alpha, false}, 0.0, upper, cfg.abs_tol / 4.0,
                                       cfg.quad_max_refinements);
    if (!q.converged) throw AccuracyError("Hermite integral did not converge", q.value, q.residual);
    const double err = q.residual + cfg.trunc_threshold + kRoundoff * hermite_cancellation(s, alpha);
    return {q.value, err, EvalPath::hermite};
}

Complex hermite_h(Complex s, double alpha, const EvalConfig& cfg) {
    return hermite_h_detailed(s, alpha, cfg).value;
}

Complex hermite_h_deriv(Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    cfg.validate();
    const double upper = truncation_point(s, alpha, cfg.trunc_threshold, true);
    const auto q = detail::adaptive_gl(HermiteIntegrand{s, alpha, true}, 0.0, upper, cfg.abs_tol / 4.0,
                                       cfg.quad_max_refinements);
    if (!q.converged) throw AccuracyError("Hermite derivative integral did not converge", q.value, q.residual);
    return q.value;
}

EvalPath select_path(Complex s, double alpha, const EvalConfig& cfg) {
    if (s.real() >= cfg.series_cutoff_sigma) return EvalPath::series;
    const double hermite_err = 4.0 * kRoundoff * hermite_cancellation(s, alpha);
    if (hermite_err <= cfg.abs_tol / 10.0) return EvalPath::hermite;
    const double em_err = 4.0 * kRoundoff * em_magnitude(s, alpha);
    return em_err < hermite_err ? EvalPath::euler_maclaurin : EvalPath::hermite;
}

EvalResult hurwitz_zeta_regular(Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    cfg.validate();
    const EvalPath path = select_path(s, alpha, cfg);
    if (path == EvalPath::hermite) return hermite_regular(s, alpha, cfg);
    const auto em = euler_maclaurin(s, alpha, false, cfg.abs_tol);
    return {em.regular, em.abs_err, path};
}

EvalResult hurwitz_zeta_via(EvalPath path, Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    check_not_pole(s);
    cfg.validate();
    const Complex pole = 1.0 / (s - 1.0);
    if (path == EvalPath::hermite) {
        auto r = hermite_regular(s, alpha, cfg);
        r.value += pole;
        return r;
    }
    const auto em = euler_maclaurin(s, alpha, false, cfg.abs_tol);
    return {em.regular + pole, em.abs_err, path};
}

EvalResult hurwitz_zeta_detailed(Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    return hurwitz_zeta_via(select_path(s, alpha, cfg), s, alpha, cfg);
}

Complex hurwitz_zeta(Complex s, double alpha, const EvalConfig& cfg) {
    const auto r = hurwitz_zeta_detailed(s, alpha, cfg);
    if (!is_finite(r.value)) throw NumericalError("non-finite zeta value");
    return r.value;
}

Complex riemann_zeta(Complex s, const EvalConfig& cfg) { return hurwitz_zeta(s, 1.0, cfg); }

EvalResult hurwitz_zeta_deriv_via(EvalPath path, Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    check_not_pole(s);
    cfg.validate();
    const Complex sm1 = s - 1.0;
    if (path == EvalPath::hermite) {
        const Complex v = -1.0 / (sm1 * sm1) + hermite_d_deriv(s, alpha) + hermite_h_deriv(s, alpha, cfg);
        return {v, cfg.abs_tol, path};
    }
    const auto em = euler_maclaurin(s, alpha, true, cfg.abs_tol);
    return {em.deriv, em.abs_err, path};
}

Complex hurwitz_zeta_deriv(Complex s, double alpha, const EvalConfig& cfg) {
    check_alpha(alpha);
    check_s(s);
    const auto r = hurwitz_zeta_deriv_via(select_path(s, alpha, cfg), s, alpha, cfg);
    if (!is_finite(r.value)) throw NumericalError("non-finite zeta derivative");
    return r.value;
}

Complex riemann_zeta_deriv(Complex s, const EvalConfig& cfg) { return hurwitz_zeta_deriv(s, 1.0, cfg); }

}  // namespace zflow
