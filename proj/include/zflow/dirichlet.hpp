#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zflow/special_fn.hpp"

namespace zflow {

/// A validated Dirichlet character chi_m stored as its period-m value table.
/// values()[r-1] is chi(r) for r = 1..m; the last entry is chi(m) = chi(0 mod m).
class CharacterTable {
public:
    /// Validates and wraps a raw table; throws ValidationError naming the failing residue or pair.
    static CharacterTable validate(std::vector<Complex> values);

    int period() const noexcept { return static_cast<int>(values_.size()); }
    const std::vector<Complex>& values() const noexcept { return values_; }
    /// chi(n) for any n >= 0, extended periodically.
    Complex operator()(long long n) const;
    bool is_principal() const noexcept { return principal_; }
    bool is_real() const noexcept { return real_; }

private:
    explicit CharacterTable(std::vector<Complex> values);
    std::vector<Complex> values_;
    bool principal_ = false;
    bool real_ = false;
};

CharacterTable principal_character(int m);

/// All phi(p) characters modulo a prime p, indexed by j in chi_j(g^k) = exp(2 pi i j k / (p-1)) with g the least primitive root.
std::vector<CharacterTable> prime_characters(int p);

/// Parses {"period": m, "values": [[re, im], ...]} and validates.
CharacterTable character_from_json(const std::string& text);
std::string character_to_json(const CharacterTable& table);

class LFunction {
public:
    explicit LFunction(CharacterTable character, EvalConfig cfg = {});

    static LFunction zeta(EvalConfig cfg = {}) { return LFunction(principal_character(1), cfg); }

    const CharacterTable& character() const noexcept { return character_; }
    const EvalConfig& eval_config() const noexcept { return cfg_; }
    bool has_pole() const noexcept { return character_.is_principal(); }
    int period() const noexcept { return character_.period(); }

    /// L_m(s) = m^{-s} sum_r chi(r) zeta(s, r/m), with the 1/(s-1) residues combined before summation.
    Complex operator()(Complex s) const;
    EvalResult evaluate(Complex s) const;
    /// L_m'(s) from the same finite Hurwitz sum.
    Complex derivative(Complex s) const;

private:
    CharacterTable character_;
    EvalConfig cfg_;
    Complex residue_weight_;  // sum_r chi(r): phi(m) for principal characters, exactly 0 otherwise
};

/// Root of zeta(sigma) = 2 on (1, 2), bisection to 1e-8 ... 1e-12.
double sigma1_root(const EvalConfig& cfg = {});

struct Sigma0Window {
    double sigma_lo = 1.0;
    double sigma_hi = 1.3;
    double t_max = 500.0;
    double sigma_step = 0.005;
    double t_step = 0.05;
    double tolerance = 1e-4;
};

struct Sigma0Estimate {
    double sigma = 0.0;
    bool attained = false;  ///< false: no sign change of Re L in the window, sigma = sigma_lo
    std::optional<double> witness_t;  ///< a t with Re L(sigma + i t) <= 0 at the returned sigma
    double min_re_at_lo = 0.0;        ///< min over the t-window of Re L(sigma_lo + i t)
};

/// Window-truncated lower estimate of the van de Lune abscissa.
Sigma0Estimate sigma0_estimate(const LFunction& L, const Sigma0Window& window = {});

/// Minimum over the t-window of Re L(sigma + i t), coarse scan refined by golden section around local minima.
std::pair<double, double> min_real_part(const LFunction& L, double sigma, double t_max, double t_step);

struct ReBoundsReport {
    Complex value;
    double lower = 0.0;  ///< max{0, 2 - zeta(Re s)}
    double upper = 0.0;  ///< zeta(Re s)
    double imag_bound = 0.0;  ///< zeta(Re s) - 1
    bool real_lower_ok = false;
    bool real_upper_ok = false;
    bool imag_ok = false;
    bool all_ok() const noexcept { return real_lower_ok && real_upper_ok && imag_ok; }
};

ReBoundsReport re_bounds_check(const LFunction& L, Complex s);

}  // namespace zflow
