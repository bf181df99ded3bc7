#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "zflow/errors.hpp"

namespace zflow::detail {

/// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendre<10>& gauss_legendre_10() {
    static const GaussLegendre<10> rule;
    return rule;
}

template <class F>
Complex gl_panel(F&& f, double a, double b) {
    const auto& rule = gauss_legendre_10();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

struct QuadOutcome {
    Complex value;
    double residual = 0.0;
    bool converged = true;
};

/// Adaptive Gauss-Legendre with dyadic bisection. A panel is accepted when the
/// 10-point estimate on it and the sum over its two halves agree to within the
/// panel's share (proportional to its length) of `tol`.
template <class F>
QuadOutcome adaptive_gl(F&& f, double a, double b, double tol, int max_refinements) {
    struct Panel {
        double lo, hi;
        Complex whole;
    };
    std::vector<Panel> stack;
    stack.reserve(64);
    stack.push_back({a, b, gl_panel(f, a, b)});
    const double width = b - a;

    QuadOutcome out{{0.0, 0.0}, 0.0, true};
    int refinements = 0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.lo + p.hi);
        const Complex left = gl_panel(f, p.lo, mid);
        const Complex right = gl_panel(f, mid, p.hi);
        const double diff = std::abs(left + right - p.whole);
        const double local_tol = tol * (p.hi - p.lo) / width;
        // rounding floor: panels whose halves agree to a few ulps of their own size are resolved
        const double floor = 64.0 * 2.2e-16 * (std::abs(left) + std::abs(right));
        if (diff <= std::max(local_tol, floor) || p.hi - p.lo < 1e-12 * width) {
            out.value += left + right;
            out.residual += diff;
            continue;
        }
        if (++refinements > max_refinements) {
            out.value += left + right;
            out.residual += diff;
            out.converged = false;
            for (const auto& rest : stack) out.value += rest.whole;
            return out;
        }
        stack.push_back({mid, p.hi, right});
        stack.push_back({p.lo, mid, left});
    }
    return out;
}

}  // namespace zflow::detail
