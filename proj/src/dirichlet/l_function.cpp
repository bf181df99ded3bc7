#include <algorithm>
#include <cmath>
#include <limits>

#include "zflow/dirichlet.hpp"

namespace zflow {

LFunction::LFunction(CharacterTable character, EvalConfig cfg)
    : character_(std::move(character)), cfg_(cfg), residue_weight_(0.0, 0.0) {
    cfg_.validate();
    if (character_.is_principal()) {
        for (const auto& v : character_.values()) residue_weight_ += v;
    }
}

EvalResult LFunction::evaluate(Complex s) const {
    if (!is_finite(s)) throw DomainError("s must be finite");
    const bool at_pole = s == Complex{1.0, 0.0};
    if (at_pole && has_pole()) throw PoleError("principal L-function has a pole at s = 1");

    const int m = period();
    Complex regular_sum{0.0, 0.0};
    double err = 0.0;
    EvalPath path = EvalPath::hermite;
    for (int r = 1; r <= m; ++r) {
        const Complex chi = character_.values()[r - 1];
        if (chi == Complex{0.0, 0.0}) continue;
        const auto part = hurwitz_zeta_regular(s, static_cast<double>(r) / m, cfg_);
        regular_sum += chi * part.value;
        err += part.abs_err;
        path = part.path;
    }
    Complex inner = regular_sum;
    if (!at_pole) inner += residue_weight_ / (s - 1.0);
    const Complex scale = std::exp(-s * std::log(static_cast<double>(m)));
    return {scale * inner, std::abs(scale) * err, path};
}

Complex LFunction::operator()(Complex s) const {
    const Complex v = evaluate(s).value;
    if (!is_finite(v)) throw NumericalError("non-finite L-function value");
    return v;
}

Complex LFunction::derivative(Complex s) const {
    if (s == Complex{1.0, 0.0}) throw PoleError("L-function derivative is evaluated away from s = 1");
    const int m = period();
    const double log_m = std::log(static_cast<double>(m));
    Complex value{0.0, 0.0};
    Complex deriv{0.0, 0.0};
    for (int r = 1; r <= m; ++r) {
        const Complex chi = character_.values()[r - 1];
        if (chi == Complex{0.0, 0.0}) continue;
        const double alpha = static_cast<double>(r) / m;
        value += chi * hurwitz_zeta(s, alpha, cfg_);
        deriv += chi * hurwitz_zeta_deriv(s, alpha, cfg_);
    }
    const Complex scale = std::exp(-s * log_m);
    return scale * (deriv - log_m * value);
}

double sigma1_root(const EvalConfig& cfg) {
    // zeta is decreasing on (1, inf) with zeta(1+) = inf and zeta(2) < 2
    double lo = 1.0 + 1e-6;
    double hi = 2.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (riemann_zeta({mid, 0.0}, cfg).real() > 2.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> min_real_part(const LFunction& L, double sigma, double t_max, double t_step) {
    if (!(t_max > 0.0) || !(t_step > 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
    const double t_lo = L.character().is_real() ? 0.0 : -t_max;
    const int n = static_cast<int>(std::ceil((t_max - t_lo) / t_step));
    const auto re_at = [&](double t) {
        if (L.has_pole() && sigma == 1.0 && t == 0.0) return std::numeric_limits<double>::infinity();
        return L({sigma, t}).real();
    };

    std::vector<double> ts(static_cast<std::size_t>(n + 1));
    std::vector<double> vals(ts.size());
    for (int i = 0; i <= n; ++i) {
        ts[i] = std::min(t_lo + i * t_step, t_max);
        vals[i] = re_at(ts[i]);
    }
    double best = *std::min_element(vals.begin(), vals.end());
    double best_t = ts[static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin())];
    const double refine_band = best + 0.5;

    constexpr double inv_phi = 0.6180339887498949;
    for (int i = 1; i < n; ++i) {
        if (!(vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1]) || vals[i] > refine_band) continue;
        double a = ts[i - 1], b = ts[i + 1];
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = re_at(c), fd = re_at(d);
        for (int it = 0; it < 30; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = re_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = re_at(d);
            }
        }
        const double t_min = fc < fd ? c : d;
        const double v_min = std::min(fc, fd);
        if (v_min < best) {
            best = v_min;
            best_t = t_min;
        }
    }
    return {best, best_t};
}

Sigma0Estimate sigma0_estimate(const LFunction& L, const Sigma0Window& w) {
    if (!(w.sigma_lo < w.sigma_hi)) throw ConfigError("sigma_lo must be below sigma_hi");
    if (w.t_max < 0.0) throw ConfigError("t_max must be non-negative");
    if (!(w.sigma_step > 0.0) || !(w.t_step > 0.0) || !(w.tolerance > 0.0))
        throw ConfigError("sigma0 window steps must be positive");

    Sigma0Estimate out;
    out.sigma = w.sigma_lo;
    if (w.t_max <= 0.0) {
        out.min_re_at_lo = std::numeric_limits<double>::infinity();
        return out;
    }
    const auto min_at = [&](double sigma) { return min_real_part(L, sigma, w.t_max, w.t_step); };

    const int steps = static_cast<int>(std::floor((w.sigma_hi - w.sigma_lo) / w.sigma_step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        const double sigma = std::max(w.sigma_hi - i * w.sigma_step, w.sigma_lo);
        const auto [m, t] = min_at(sigma);
        if (i == steps) out.min_re_at_lo = m;
        if (m > 0.0) continue;
        // sign change at sigma, none at sigma + step: bisect the boundary
        double lo = sigma, hi = std::min(sigma + w.sigma_step, w.sigma_hi);
        double witness = t;
        if (i == 0) hi = lo;
        while (hi - lo > w.tolerance) {
            const double mid = 0.5 * (lo + hi);
            const auto [mm, tt] = min_at(mid);
            if (mm <= 0.0) {
                lo = mid;
                witness = tt;
            } else {
                hi = mid;
            }
        }
        out.sigma = lo;
        out.attained = true;
        out.witness_t = witness;
        if (i != steps) out.min_re_at_lo = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    return out;
}

ReBoundsReport re_bounds_check(const LFunction& L, Complex s) {
    if (!(s.real() > 1.0)) throw DomainError("re_bounds_check needs Re s > 1");
    const double zeta_sigma = riemann_zeta({s.real(), 0.0}, L.eval_config()).real();
    ReBoundsReport rep;
    rep.value = L(s);
    rep.lower = std::max(0.0, 2.0 - zeta_sigma);
    rep.upper = zeta_sigma;
    rep.imag_bound = zeta_sigma - 1.0;
    rep.real_lower_ok = rep.value.real() > rep.lower;
    // |L(s)| <= zeta(Re s) with equality for L = zeta on the real axis
    rep.real_upper_ok = rep.value.real() <= rep.upper + 10.0 * L.eval_config().abs_tol;
    rep.imag_ok = std::abs(rep.value.imag()) < rep.imag_bound;
    return rep;
}

}  // namespace zflow
