#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "zflow/flow_ode.hpp"

namespace zflow {

/// Complex field on a periodic grid, row-major, d = 1 or 2.
struct GridField {
    int dims = 1;
    std::array<int, 2> shape{16, 1};
    std::array<double, 2> length{2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
    std::vector<Complex> values;
    double time = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double coordinate(int axis, int index) const { return length[axis] * index / shape[axis]; }
    /// Throws ConfigError on bad shape, NumericalError on non-finite values.
    void validate() const;

    static GridField constant(Complex c, int n = 16, int dims = 1, double length = 2.0 * std::numbers::pi);
};

struct FourierMode {
    std::array<int, 2> k{1, 0};
    Complex amplitude;
};

/// mean + sum a_k exp(i k.x 2pi/L).
GridField make_fourier_field(Complex mean, const std::vector<FourierMode>& modes, int n = 16, int dims = 1,
                             double length = 2.0 * std::numbers::pi);
/// Smooth random field with values in the open disc D(center, radius); deterministic in seed.
GridField make_disc_random(Complex center, double radius, std::uint64_t seed, int n = 16, int dims = 1);
/// Smooth random real field with range inside (lo, hi) and mean in [mean_lo, mean_hi].
GridField make_real_random(double lo, double hi, double mean_lo, double mean_hi, std::uint64_t seed, int n = 16,
                           int dims = 1);

/// Per-frequency multiplication by exp(-|2 pi k / L|^2 t).
GridField heat_semigroup(const GridField& field, double t);

/// Raised when the nonlinearity is evaluated inside the pole guard.
class QuenchSignal : public Error {
public:
    QuenchSignal(std::size_t index, Complex value)
        : Error("nonlinearity evaluated inside the pole guard"), index_(index), value_(value) {}
    std::size_t index() const noexcept { return index_; }
    Complex value() const noexcept { return value_; }

private:
    std::size_t index_;
    Complex value_;
};

/// Non-finite field during a march; carries the last valid state.
class FieldFailure : public NumericalError {
public:
    FieldFailure(const std::string& what, GridField last) : NumericalError(what), last_(std::move(last)) {}
    const GridField& last_valid() const noexcept { return last_; }

private:
    GridField last_;
};

/// One ETD-RK2 (Cox-Matthews) step.
GridField etd_step(const GridField& field, double dt, const FlowConfig& cfg);

struct MonitorSample {
    double t = 0.0;
    double min_p = 0.0;
    double u1_min = 0.0, u1_max = 0.0;
    double u2_min = 0.0, u2_max = 0.0;
    double sup_abs = 0.0;
    double target_dist = 0.0;  ///< sup |u - target| when a target is set
};
MonitorSample sample_monitors(const GridField& field, std::optional<Complex> target = std::nullopt);

enum class PdeTermination { completed, quenched, escaped, converged };
std::string to_string(PdeTermination reason);

struct PdeOptions {
    double dt = 1e-3;
    int snapshot_every = 0;  ///< 0: max(1, floor(t_end / dt / 200))
    double escape_norm = 1e6;
    int max_halvings = 30;
    /// Early stop once sup |u - target| < target_tol.
    std::optional<Complex> target;
    double target_tol = 1e-6;
};

struct RunRecord {
    FlowConfig cfg;
    PdeOptions options;
    std::vector<GridField> snapshots;
    std::vector<MonitorSample> monitors;  ///< one per accepted step, plus t = 0
    PdeTermination termination = PdeTermination::completed;
    std::optional<std::size_t> quench_index;
    double final_dt = 0.0;
    int halvings = 0;

    const GridField& final_field() const { return snapshots.back(); }
};

/// Marches etd_step from g to cfg.t_end or an early stop.
RunRecord integrate_pde(const GridField& g, const FlowConfig& cfg, const PdeOptions& options = {});

/// sup |u_dt - u_{dt/2}| at t_end from two constant-step marches; estimates the dt run's error.
double self_convergence_estimate(const GridField& g, const FlowConfig& cfg, double dt);

struct EnvelopeSpec {
    double i1 = 0.0, s1 = 0.0, i2 = 0.0, s2 = 0.0;
    bool real_datum = false;
    double i = 0.0, s = 0.0;
    int k1 = 0, k2 = 0;  ///< -2k1 = max{-2k <= I}; -2k2 = min{-2k >= S} (k2 = 0 marks S > -2, bound S)
    int n1 = 0, n2 = 0;  ///< I in (-4n1, -4n1 + 4), S in (-4n2, -4n2 + 4); 0 when undefined
};
EnvelopeSpec envelope_spec_from(const GridField& g);

enum class Theorem { thm1_5, cor1_6, thm1_7i, thm1_7ii, thm1_7iii };
Theorem parse_theorem(const std::string& id);
std::string to_string(Theorem theorem);

struct EnvelopeReport {
    bool pass = false;
    double worst_margin = 0.0;  ///< minimal signed distance to the bounds (negative: violated)
    double worst_t = 0.0;
    double slack = 0.0;
    std::string detail;
};

/// Checks a theorem's bounds at every snapshot and grid point, allowing 1e-6 + 10 * discretization_error.
EnvelopeReport envelope_check(const RunRecord& run, const EnvelopeSpec& spec, Theorem theorem,
                              double discretization_error = 0.0);

struct StabilityOptions {
    double dt = 0.05;
    double t_end = 100.0;
    double tol = 1e-6;
    double transient = 1.0;
};

struct StabilityReport {
    bool converged = false;
    double convergence_time = 0.0;
    double final_sup = 0.0;
    bool monotone_after_transient = true;
    bool disc_contained = true;
    bool escaped = false;  ///< left D(z0, 2 delta)
    std::vector<std::pair<double, double>> sup_history;  ///< (t, sup |u - z0|)
};

StabilityReport stability_experiment(const ZeroRecord& z0, double delta, const GridField& datum, const FlowConfig& cfg,
                                     const StabilityOptions& options = {});

struct SolverConstants {
    double beta = 0.0;
    double eps = 0.0;
    int m = 1;
    double h1 = 0.0, h2 = 0.0, d1 = 0.0, d2 = 0.0;
    double z1 = 0.0, z2 = 0.0;
    double m1 = 0.0, m2 = 0.0;
    double t_local = 0.0;
};

SolverConstants local_constants(double beta, double eps, int m);

/// max(sup |Re g|, sup |Im g|)
double y_norm(const GridField& g);
/// inf over the grid of P(g)
double min_pole_distance(const GridField& g);

struct PicardResult {
    GridField solution;  ///< iterate at t_local
    std::vector<double> differences;  ///< sup distance between successive iterates
    std::vector<double> ratios;
    bool contracted = true;  ///< every ratio <= 0.5
    double etd_difference = 0.0;
};

/// Duhamel fixed-point iteration on [0, t_local] with 32-node composite Gauss in time.
PicardResult picard_local_solve(const GridField& g, const SolverConstants& consts, int n_iter, const FlowConfig& cfg);

}  // namespace zflow
