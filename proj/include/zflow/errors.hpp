#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace zflow {

using Complex = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (alpha out of (0,1], Re s <= 1 where > 1 is needed, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation at the pole s = 1 of zeta or of a principal L-function.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or a theorem hypothesis that does not hold for the requested check.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dirichlet character table that violates a defining property.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of refinements before meeting its tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, Complex best_estimate, double residual)
        : Error(what), best_estimate_(best_estimate), residual_(residual) {}

    Complex best_estimate() const noexcept { return best_estimate_; }
    double residual() const noexcept { return residual_; }

private:
    Complex best_estimate_;
    double residual_;
};

/// NaN/Inf produced where a finite value is required, or an integrator that cannot make progress.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Step size fell below dt_min; carries the last accepted state.
class StiffnessError : public NumericalError {
public:
    StiffnessError(const std::string& what, double t, Complex state)
        : NumericalError(what), t_(t), state_(state) {}
    double t() const noexcept { return t_; }
    Complex state() const noexcept { return state_; }

private:
    double t_;
    Complex state_;
};

/// Zero whose derivative real part is too small to decide sink vs source.
class DegenerateZeroError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration that failed to contract.
class ContractionError : public Error {
public:
    ContractionError(const std::string& what, double observed_ratio)
        : Error(what), observed_ratio_(observed_ratio) {}
    double observed_ratio() const noexcept { return observed_ratio_; }

private:
    double observed_ratio_;
};

inline bool is_finite(Complex z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace zflow
