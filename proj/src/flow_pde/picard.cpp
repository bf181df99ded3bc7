#include <algorithm>
#include <array>
#include <cmath>

#include "spectral.hpp"

namespace zflow {

namespace {

constexpr int kPanels = 8;
constexpr int kOrder = 4;
constexpr int kNodes = kPanels * kOrder;

// 4-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, kOrder> kGaussX{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
constexpr std::array<double, kOrder> kGaussW{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};

double lagrange(const std::array<double, kOrder>& xs, int i, double x) {
    double v = 1.0;
    for (int j = 0; j < kOrder; ++j)
        if (j != i) v *= (x - xs[j]) / (xs[i] - xs[j]);
    return v;
}

double sup_distance(const std::vector<std::vector<Complex>>& a, const std::vector<std::vector<Complex>>& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < a[j].size(); ++i) d = std::max(d, std::abs(a[j][i] - b[j][i]));
    return d;
}

}  // namespace

SolverConstants local_constants(double beta, double eps, int m) {
    if (!(beta > 0.0) || !(eps > 0.0) || m < 1) throw ConfigError("local constants need beta, eps > 0 and m >= 1");
    SolverConstants c;
    c.beta = beta;
    c.eps = eps;
    c.m = m;
    const double alpha = 1.0 / m;
    const auto bc = bound_constants(alpha, beta);
    c.h1 = bc.h1;
    c.h2 = bc.h2;
    c.d2 = bc.d2;
    c.d1 = d1_numeric(alpha, beta);
    c.z1 = 1.0 / eps + c.h1 + c.d1;
    c.z2 = 1.0 / (eps * eps) + std::sqrt(2.0) * c.h2 + std::sqrt(2.0) * c.d2;
    const double md = static_cast<double>(m);
    c.m1 = std::pow(md, beta + 1.0) * c.z1;
    c.m2 = (std::pow(md, beta + 1.0) + std::pow(md, beta + 2.0)) * c.z2;
    c.t_local = std::min({1.0 / (2.0 * c.m2), beta / (2.0 * c.m1), eps / (4.0 * c.m1)});
    return c;
}

PicardResult picard_local_solve(const GridField& g, const SolverConstants& consts, int n_iter, const FlowConfig& cfg) {
    g.validate();
    cfg.validate();
    if (n_iter < 1) throw ConfigError("picard_local_solve needs n_iter >= 1");
    if (!(consts.t_local > 0.0)) throw ConfigError("t_local must be positive");
    if (2.0 * y_norm(g) > consts.beta * (1.0 + 1e-12)) throw ConfigError("datum violates 2 ||g||_Y <= beta");
    if (cfg.nonlinearity.has_pole() && min_pole_distance(g) < 3.0 * consts.eps * (1.0 - 1e-12))
        throw ConfigError("datum violates inf P(g) >= 3 eps");

    const double T = consts.t_local;
    const double panel = T / kPanels;
    // nodes tau[p * kOrder + i], targets are the nodes plus T
    std::array<double, kNodes> tau{}, weight{};
    for (int p = 0; p < kPanels; ++p)
        for (int i = 0; i < kOrder; ++i) {
            tau[p * kOrder + i] = panel * (p + 0.5 * (kGaussX[i] + 1.0));
            weight[p * kOrder + i] = 0.5 * panel * kGaussW[i];
        }
    std::array<double, kOrder> local_x{};
    for (int i = 0; i < kOrder; ++i) local_x[i] = 0.5 * (kGaussX[i] + 1.0);

    detail::Spectral sp(g);
    const auto& sym = sp.symbol();
    const std::size_t nk = sym.size();
    std::vector<Complex> g_hat;
    sp.forward(g.values, g_hat);

    const int n_targets = kNodes + 1;
    const auto target_time = [&](int j) { return j < kNodes ? tau[j] : T; };

    // iterate in physical space at every target; start from the free heat flow
    std::vector<std::vector<Complex>> u(n_targets), next(n_targets);
    for (int j = 0; j < n_targets; ++j) {
        std::vector<Complex> hat(nk);
        for (std::size_t k = 0; k < nk; ++k) hat[k] = std::exp(sym[k] * target_time(j)) * g_hat[k];
        sp.backward(hat, u[j]);
    }

    PicardResult res;
    std::vector<std::vector<Complex>> n_hat(kNodes);
    for (int it = 0; it < n_iter; ++it) {
        for (int i = 0; i < kNodes; ++i) {
            std::vector<Complex> nl;
            detail::evaluate_field(u[i], cfg, nl);
            sp.forward(nl, n_hat[i]);
        }
        for (int j = 0; j < n_targets; ++j) {
            const double t = target_time(j);
            const int full = j < kNodes ? j / kOrder : kPanels;
            std::vector<Complex> hat(nk);
            for (std::size_t k = 0; k < nk; ++k) hat[k] = std::exp(sym[k] * t) * g_hat[k];
            for (int i = 0; i < full * kOrder; ++i)
                for (std::size_t k = 0; k < nk; ++k) hat[k] += weight[i] * std::exp(sym[k] * (t - tau[i])) * n_hat[i][k];
            if (j < kNodes) {
                // partial panel [a, t]: Gauss on the sub-interval, integrand from the panel's Lagrange interpolant
                const int p = full;
                const double a = p * panel;
                const double len = t - a;
                for (int l = 0; l < kOrder; ++l) {
                    const double sigma = a + 0.5 * len * (kGaussX[l] + 1.0);
                    const double w = 0.5 * len * kGaussW[l];
                    const double xloc = (sigma - a) / panel;
                    for (int i = 0; i < kOrder; ++i) {
                        const double li = lagrange(local_x, i, xloc) * w;
                        const auto& src = n_hat[p * kOrder + i];
                        for (std::size_t k = 0; k < nk; ++k) hat[k] += li * std::exp(sym[k] * (t - sigma)) * src[k];
                    }
                }
            }
            sp.backward(hat, next[j]);
        }
        const double diff = sup_distance(next, u);
        u.swap(next);
        res.differences.push_back(diff);
        double scale = 0.0;
        for (const auto& v : u.back()) scale = std::max(scale, std::abs(v));
        const double floor = 1e-13 * std::max(1.0, scale);
        if (res.differences.size() >= 2 && res.differences[res.differences.size() - 2] > floor) {
            const double ratio = diff / res.differences[res.differences.size() - 2];
            res.ratios.push_back(ratio);
            if (ratio > 0.5) res.contracted = false;
            if (ratio > 1.0 && diff > floor) throw ContractionError("Picard iteration failed to contract", ratio);
        }
        if (diff <= floor) break;
    }

    res.solution = g;
    res.solution.values = u.back();
    res.solution.time = g.time + T;

    FlowConfig etd_cfg = cfg;
    etd_cfg.t_end = T;
    PdeOptions opts;
    opts.dt = T / 64.0;
    const auto march = integrate_pde(g, etd_cfg, opts);
    for (std::size_t i = 0; i < g.size(); ++i)
        res.etd_difference =
            std::max(res.etd_difference, std::abs(march.final_field().values[i] - res.solution.values[i]));
    return res;
}

}  // namespace zflow
