#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spectral.hpp"

namespace zflow {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridField layout(int n, int dims, double length) {
    GridField f;
    f.dims = dims;
    f.shape = {n, dims == 2 ? n : 1};
    f.length = {length, length};
    f.values.assign(static_cast<std::size_t>(f.shape[0]) * f.shape[1], Complex{0.0, 0.0});
    return f;
}

// Random low-frequency trigonometric polynomial with decaying amplitudes, zero mean on the grid.
std::vector<Complex> smooth_modes(GridField& f, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<FourierMode> modes;
    const int kmax = f.dims == 2 ? 3 : 4;
    for (int a = -kmax; a <= kmax; ++a) {
        for (int b = (f.dims == 2 ? -kmax : 0); b <= (f.dims == 2 ? kmax : 0); ++b) {
            if (a == 0 && b == 0) continue;
            const double decay = 1.0 / (1.0 + a * a + b * b);
            modes.push_back({{a, b}, Complex{normal(rng), normal(rng)} * decay});
        }
    }
    const GridField w = make_fourier_field({0.0, 0.0}, modes, f.shape[0], f.dims, f.length[0]);
    return w.values;
}

}  // namespace

void GridField::validate() const {
    if (dims != 1 && dims != 2) throw ConfigError("grid dimension must be 1 or 2");
    if (!power_of_two(shape[0]) || shape[0] < 16) throw ConfigError("grid points per axis must be a power of two >= 16");
    if (dims == 2 && (!power_of_two(shape[1]) || shape[1] < 16))
        throw ConfigError("grid points per axis must be a power of two >= 16");
    if (dims == 1 && shape[1] != 1) throw ConfigError("1-d grid must have shape[1] = 1");
    if (!(length[0] > 0.0) || (dims == 2 && !(length[1] > 0.0))) throw ConfigError("domain length must be positive");
    if (values.size() != static_cast<std::size_t>(shape[0]) * shape[1])
        throw ConfigError("field value count does not match its shape");
    for (const auto& v : values)
        if (!is_finite(v)) throw NumericalError("field contains non-finite values");
}

GridField GridField::constant(Complex c, int n, int dims, double length) {
    GridField f = layout(n, dims, length);
    std::fill(f.values.begin(), f.values.end(), c);
    f.validate();
    return f;
}

GridField make_fourier_field(Complex mean, const std::vector<FourierMode>& modes, int n, int dims, double length) {
    GridField f = layout(n, dims, length);
    const int n1 = f.shape[1];
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n1; ++b) {
            const double x = f.coordinate(0, a), y = dims == 2 ? f.coordinate(1, b) : 0.0;
            Complex v = mean;
            for (const auto& m : modes) {
                const double phase = 2.0 * std::numbers::pi * (m.k[0] * x + (dims == 2 ? m.k[1] * y : 0.0)) / length;
                v += m.amplitude * std::polar(1.0, phase);
            }
            f.values[static_cast<std::size_t>(a) * n1 + b] = v;
        }
    }
    f.validate();
    return f;
}

GridField make_disc_random(Complex center, double radius, std::uint64_t seed, int n, int dims) {
    if (!(radius > 0.0)) throw ConfigError("disc radius must be positive");
    GridField f = layout(n, dims, 2.0 * std::numbers::pi);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Complex offset = std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    const double shrink = 0.5 + 0.45 * unit(rng);
    auto w = smooth_modes(f, rng);
    double sup = 0.0;
    for (auto& v : w) {
        v += offset;
        sup = std::max(sup, std::abs(v));
    }
    for (std::size_t i = 0; i < w.size(); ++i) f.values[i] = center + radius * shrink * w[i] / sup;
    return f;
}

GridField make_real_random(double lo, double hi, double mean_lo, double mean_hi, std::uint64_t seed, int n, int dims) {
    if (!(lo < mean_lo && mean_lo <= mean_hi && mean_hi < hi)) throw ConfigError("need lo < mean_lo <= mean_hi < hi");
    GridField f = layout(n, dims, 2.0 * std::numbers::pi);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double c = mean_lo + (mean_hi - mean_lo) * unit(rng);
    const double amp = (0.5 + 0.45 * unit(rng)) * std::min(c - lo, hi - c);
    const auto w = smooth_modes(f, rng);
    double sup = 0.0;
    for (const auto& v : w) sup = std::max(sup, std::abs(v.real()));
    for (std::size_t i = 0; i < w.size(); ++i) f.values[i] = c + amp * w[i].real() / sup;
    return f;
}

GridField heat_semigroup(const GridField& field, double t) {
    if (!(t >= 0.0)) throw DomainError("heat semigroup needs t >= 0");
    field.validate();
    GridField out = field;
    if (t == 0.0) return out;
    detail::Spectral sp(field);
    std::vector<Complex> hat;
    sp.forward(field.values, hat);
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= std::exp(sp.symbol()[k] * t);
    sp.backward(hat, out.values);
    out.time = field.time + t;
    return out;
}

double y_norm(const GridField& g) {
    double r = 0.0;
    for (const auto& v : g.values) r = std::max({r, std::abs(v.real()), std::abs(v.imag())});
    return r;
}

double min_pole_distance(const GridField& g) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& v : g.values) r = std::min(r, pole_distance(v));
    return r;
}

MonitorSample sample_monitors(const GridField& field, std::optional<Complex> target) {
    MonitorSample m;
    m.t = field.time;
    m.min_p = std::numeric_limits<double>::infinity();
    m.u1_min = m.u2_min = std::numeric_limits<double>::infinity();
    m.u1_max = m.u2_max = -std::numeric_limits<double>::infinity();
    for (const auto& v : field.values) {
        m.min_p = std::min(m.min_p, pole_distance(v));
        m.u1_min = std::min(m.u1_min, v.real());
        m.u1_max = std::max(m.u1_max, v.real());
        m.u2_min = std::min(m.u2_min, v.imag());
        m.u2_max = std::max(m.u2_max, v.imag());
        m.sup_abs = std::max(m.sup_abs, std::abs(v));
        if (target) m.target_dist = std::max(m.target_dist, std::abs(v - *target));
    }
    return m;
}

}  // namespace zflow
