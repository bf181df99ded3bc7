#include "spectral.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace zflow::detail {

namespace {

double wavenumber(int j, int n, double length) {
    const int f = j <= n / 2 ? j : j - n;
    return 2.0 * std::numbers::pi * f / length;
}

}  // namespace

Spectral::Spectral(const GridField& layout) {
    const int n0 = layout.shape[0];
    const int n1 = layout.dims == 2 ? layout.shape[1] : 1;
    const std::size_t total = static_cast<std::size_t>(n0) * n1;
    symbol_.resize(total);
    for (int a = 0; a < n0; ++a) {
        const double ka = wavenumber(a, n0, layout.length[0]);
        for (int b = 0; b < n1; ++b) {
            const double kb = layout.dims == 2 ? wavenumber(b, n1, layout.length[1]) : 0.0;
            symbol_[static_cast<std::size_t>(a) * n1 + b] = -(ka * ka + kb * kb);
        }
    }
    buffer_ = fftw_alloc_complex(total);
    if (layout.dims == 1) {
        forward_plan_ = fftw_plan_dft_1d(n0, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_plan_ = fftw_plan_dft_1d(n0, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        forward_plan_ = fftw_plan_dft_2d(n0, n1, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_plan_ = fftw_plan_dft_2d(n0, n1, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
}

Spectral::~Spectral() {
    fftw_destroy_plan(forward_plan_);
    fftw_destroy_plan(backward_plan_);
    fftw_free(buffer_);
}

void Spectral::forward(const std::vector<Complex>& in, std::vector<Complex>& out) {
    std::memcpy(buffer_, in.data(), in.size() * sizeof(Complex));
    fftw_execute(forward_plan_);
    const auto* src = reinterpret_cast<const Complex*>(buffer_);
    out.assign(src, src + in.size());
}

void Spectral::backward(const std::vector<Complex>& in, std::vector<Complex>& out) {
    std::memcpy(buffer_, in.data(), in.size() * sizeof(Complex));
    fftw_execute(backward_plan_);
    out.resize(in.size());
    const double scale = 1.0 / static_cast<double>(in.size());
    const auto* src = reinterpret_cast<const Complex*>(buffer_);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = src[i] * scale;
}

void EtdMultipliers::prepare(const std::vector<double>& symbol, double step) {
    if (step == h && e.size() == symbol.size()) return;
    h = step;
    e.resize(symbol.size());
    p1.resize(symbol.size());
    p2.resize(symbol.size());
    for (std::size_t k = 0; k < symbol.size(); ++k) {
        const double z = symbol[k] * step;
        e[k] = std::exp(z);
        if (std::abs(z) < 1e-4) {
            p1[k] = step * (1.0 + z / 2.0 + z * z / 6.0);
            p2[k] = step * (0.5 + z / 6.0 + z * z / 24.0);
        } else {
            const double em1 = std::expm1(z);
            p1[k] = step * em1 / z;
            p2[k] = step * (em1 - z) / (z * z);
        }
    }
}

void evaluate_field(const std::vector<Complex>& u, const FlowConfig& cfg, std::vector<Complex>& out) {
    const bool guard = cfg.nonlinearity.has_pole();
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (guard && pole_distance(u[i]) < cfg.pole_guard_eps) throw QuenchSignal(i, u[i]);
        out[i] = (i > 0 && u[i] == u[i - 1]) ? out[i - 1] : cfg.field(u[i]);
    }
}

void etd_advance(Spectral& sp, const EtdMultipliers& mult, const FlowConfig& cfg, std::vector<Complex>& u,
                 std::vector<Complex>* stage) {
    std::vector<Complex> n0, n1, u_hat, n0_hat, n1_hat, a;
    evaluate_field(u, cfg, n0);
    sp.forward(u, u_hat);
    sp.forward(n0, n0_hat);
    std::vector<Complex> a_hat(u_hat.size());
    for (std::size_t k = 0; k < u_hat.size(); ++k) a_hat[k] = mult.e[k] * u_hat[k] + mult.p1[k] * n0_hat[k];
    sp.backward(a_hat, a);
    if (stage) *stage = a;
    evaluate_field(a, cfg, n1);
    sp.forward(n1, n1_hat);
    for (std::size_t k = 0; k < u_hat.size(); ++k) a_hat[k] += mult.p2[k] * (n1_hat[k] - n0_hat[k]);
    sp.backward(a_hat, u);
}

}  // namespace zflow::detail
