#pragma once

// Hurwitz and Riemann zeta from the Hermite integral representation
//
//   zeta(s, a) = 1/(s-1) + d(s, a) + h(s, a)
//   d(s, a)    = (a^(1-s) - 1)/(s-1) + 1/(2 a^s)
//   h(s, a)    = 2 int_0^inf sin(s atan(t/a)) / ((a^2+t^2)^(s/2) (e^(2 pi t) - 1)) dt
//
// with an Euler-Maclaurin summation path used for large Re s and for
// arguments where the Hermite integrand cancels catastrophically.

#include <string_view>

#include "zflow/errors.hpp"

namespace zflow {

enum class QuadRule { adaptive_gauss_legendre };

struct EvalConfig {
    double abs_tol = 1e-10;
    QuadRule quad_rule = QuadRule::adaptive_gauss_legendre;
    /// Maximum number of panel bisections in one adaptive integration.
    int quad_max_refinements = 4000;
    double trunc_threshold = 1e-11;
    double series_cutoff_sigma = 8.0;

    /// Throws ConfigError unless abs_tol > 0, trunc_threshold <= abs_tol/10 and series_cutoff_sigma > 1.
    void validate() const;
};

enum class EvalPath { hermite, series, euler_maclaurin };

std::string_view to_string(EvalPath path);

struct EvalResult {
    Complex value;
    /// Estimated absolute error (quadrature residual or first neglected correction plus rounding).
    double abs_err = 0.0;
    EvalPath path = EvalPath::hermite;
};

/// Entire function f(u) = (e^u - 1)/u, f(0) = 1.
Complex expm1_ratio(Complex u);
/// f'(u) = (e^u (u - 1) + 1)/u^2, f'(0) = 1/2.
Complex expm1_ratio_deriv(Complex u);

/// The entire part d(s, alpha) of the Hermite decomposition.
Complex hermite_d(Complex s, double alpha);
/// Derivative in s of hermite_d.
Complex hermite_d_deriv(Complex s, double alpha);

/// The Hermite integral h(s, alpha), adaptive Gauss-Legendre on a certified truncation [0, T].
Complex hermite_h(Complex s, double alpha, const EvalConfig& cfg = {});
EvalResult hermite_h_detailed(Complex s, double alpha, const EvalConfig& cfg = {});
/// Derivative in s of hermite_h.
Complex hermite_h_deriv(Complex s, double alpha, const EvalConfig& cfg = {});

/// zeta(s, alpha) - 1/(s-1): entire in s, finite at s = 1.
EvalResult hurwitz_zeta_regular(Complex s, double alpha, const EvalConfig& cfg = {});

Complex hurwitz_zeta(Complex s, double alpha, const EvalConfig& cfg = {});
EvalResult hurwitz_zeta_detailed(Complex s, double alpha, const EvalConfig& cfg = {});

/// Forces one evaluation path regardless of the automatic selection.
EvalResult hurwitz_zeta_via(EvalPath path, Complex s, double alpha, const EvalConfig& cfg = {});

Complex riemann_zeta(Complex s, const EvalConfig& cfg = {});

Complex hurwitz_zeta_deriv(Complex s, double alpha, const EvalConfig& cfg = {});
EvalResult hurwitz_zeta_deriv_via(EvalPath path, Complex s, double alpha, const EvalConfig& cfg = {});
Complex riemann_zeta_deriv(Complex s, const EvalConfig& cfg = {});

/// Path the automatic selection would use for (s, alpha).
EvalPath select_path(Complex s, double alpha, const EvalConfig& cfg = {});

// Explicit majorants for h, h', d' on the box [-beta, beta]^2.

struct BoundConstants {
    double h1 = 0.0;    ///< bound on |h|, 2(a_ab + b_b)
    double h2 = 0.0;    ///< bound on |h'|, I_1 + I_2 closed forms
    double d2 = 0.0;    ///< bound on |d'|
    double e_r = 0.0;   ///< E_r at r = ln(1/alpha)(beta+1); 0 when alpha = 1
    double a_ab = 0.0;
    double b_b = 0.0;
};

/// E_r = e^r (2r^2 + 6r + 4) / r^2, a bound for |f'| on [-r, r]^2.
double e_const(double r);
double a_const(double alpha, double beta);
double b_const(double beta);

BoundConstants bound_constants(double alpha, double beta);

/// 1.1 times the sampled sup of |d(., alpha)| on a 101 x 101 grid of [-beta, beta]^2.
double d1_numeric(double alpha, double beta);

}  // namespace zflow
