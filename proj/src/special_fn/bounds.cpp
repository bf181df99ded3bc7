#include <algorithm>
#include <cmath>
#include <numbers>

#include "zflow/special_fn.hpp"

namespace zflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_inputs(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
}

// Majorant of the h' integral piece carrying sec(w)^{p} with p = beta + 2 or beta + 3.
double secant_integral_bound(double alpha, double p) {
    const double base = std::sqrt(p * p + 4.0 * kPi * kPi * alpha * alpha) / (2.0 * kPi * alpha);
    return kPi / 2.0 * std::pow(base, p) * (1.0 + (kPi / 2.0) / std::expm1(p));
}

}  // namespace

double e_const(double r) {
    if (!(r > 0.0)) throw DomainError("E_r needs r > 0");
    return std::exp(r) * (2.0 * r * r + 6.0 * r + 4.0) / (r * r);
}

double a_const(double alpha, double beta) {
    check_inputs(alpha, beta);
    return std::pow(1.0 + 1.0 / (alpha * alpha), beta / 2.0) * (beta / alpha + std::sinh(beta / alpha)) /
           (2.0 * kPi);
}

double b_const(double beta) {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    const double lead = beta * kPi / 2.0 + std::sinh(beta * kPi / 2.0);
    const double two_pow = std::pow(2.0, beta / 2.0);
    const double moments = (two_pow + 1.0) / kPi + two_pow * std::tgamma(beta + 1.0) / std::pow(kPi, beta + 1.0) +
                           2.0 / (kPi * kPi * kPi);
    return lead * moments;
}

BoundConstants bound_constants(double alpha, double beta) {
    check_inputs(alpha, beta);
    BoundConstants c;
    c.a_ab = a_const(alpha, beta);
    c.b_b = b_const(beta);
    c.h1 = 2.0 * (c.a_ab + c.b_b);

    const double sinh_half = std::sinh(beta * kPi / 2.0);
    const double alpha_pow = std::pow(alpha, beta);
    const double i1 = (1.0 + sinh_half) * (2.0 / alpha_pow) * secant_integral_bound(alpha, beta + 2.0);
    const double i2 = (4.0 / alpha_pow) * (beta + 2.0 / kPi * sinh_half) * secant_integral_bound(alpha, beta + 3.0);
    c.h2 = i1 + i2;

    if (alpha < 1.0) {
        const double log_inv = std::log(1.0 / alpha);
        c.e_r = e_const(log_inv * (beta + 1.0));
        c.d2 = log_inv * log_inv * c.e_r + log_inv / (2.0 * alpha_pow);
    }
    return c;
}

double d1_numeric(double alpha, double beta) {
    check_inputs(alpha, beta);
    constexpr int n = 101;
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -beta + 2.0 * beta * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double y = -beta + 2.0 * beta * j / (n - 1);
            sup = std::max(sup, std::abs(hermite_d({x, y}, alpha)));
        }
    }
    return 1.1 * sup;
}

}  // namespace zflow
