#pragma once

#include <fftw3.h>

#include <vector>

#include "zflow/flow_pde.hpp"

namespace zflow::detail {

/// FFTW plans and Laplacian symbol for one grid layout.
class Spectral {
public:
    explicit Spectral(const GridField& layout);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    std::size_t size() const noexcept { return symbol_.size(); }
    /// -|2 pi k / L|^2 per mode, in FFTW order.
    const std::vector<double>& symbol() const noexcept { return symbol_; }

    void forward(const std::vector<Complex>& in, std::vector<Complex>& out);
    /// Normalized inverse.
    void backward(const std::vector<Complex>& in, std::vector<Complex>& out);

private:
    std::vector<double> symbol_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_plan_ = nullptr;
    fftw_plan backward_plan_ = nullptr;
};

/// ETD-RK2 multipliers exp(c h), h phi1(c h), h phi2(c h) for one step size.
struct EtdMultipliers {
    double h = 0.0;
    std::vector<double> e, p1, p2;
    void prepare(const std::vector<double>& symbol, double step);
};

/// lambda F(u) pointwise; throws QuenchSignal inside the pole guard.
void evaluate_field(const std::vector<Complex>& u, const FlowConfig& cfg, std::vector<Complex>& out);

/// One ETD-RK2 step in place on physical values; the intermediate stage is copied to `stage` when given.
void etd_advance(Spectral& sp, const EtdMultipliers& mult, const FlowConfig& cfg, std::vector<Complex>& u,
                 std::vector<Complex>* stage = nullptr);

}  // namespace zflow::detail
