#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zflow/flow_pde.hpp"

using zflow::Complex;
using zflow::FlowConfig;
using zflow::GridField;
using zflow::PdeOptions;
using zflow::PdeTermination;
using zflow::Theorem;

namespace {

double sup_diff(const GridField& a, const GridField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

double non_mean_energy(const GridField& f) {
    Complex mean{0.0, 0.0};
    for (const auto& v : f.values) mean += v;
    mean /= static_cast<double>(f.size());
    double e = 0.0;
    for (const auto& v : f.values) e += std::norm(v - mean);
    return e;
}

GridField cosine_field(Complex mean, double amp, int k = 1, int n = 32) {
    return zflow::make_fourier_field(mean, {{{k, 0}, amp / 2.0}, {{-k, 0}, amp / 2.0}}, n);
}

FlowConfig with_end(double t_end, int lambda = 1) {
    FlowConfig cfg;
    cfg.t_end = t_end;
    cfg.lambda = lambda;
    return cfg;
}

}  // namespace

TEST_CASE("grid field validation") {
    CHECK_NOTHROW(GridField::constant(1.5, 16));
    CHECK_NOTHROW(GridField::constant(1.5, 32, 2));
    CHECK_THROWS_AS(GridField::constant(1.5, 8), zflow::ConfigError);
    CHECK_THROWS_AS(GridField::constant(1.5, 24), zflow::ConfigError);
    CHECK_THROWS_AS(GridField::constant(1.5, 16, 3), zflow::ConfigError);
    auto f = GridField::constant(1.5, 16);
    f.values[3] = Complex{std::nan(""), 0.0};
    CHECK_THROWS_AS(f.validate(), zflow::NumericalError);
}

TEST_CASE("random data builders") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = zflow::make_disc_random({-2.0, 0.0}, 0.05, seed);
        for (const auto& v : d.values) CHECK(std::abs(v + 2.0) < 0.05);
        const auto r = zflow::make_real_random(-7.5, -2.5, -5.5, -3.0, seed, 16, seed % 2 ? 1 : 2);
        for (const auto& v : r.values) {
            CHECK(v.real() > -7.5);
            CHECK(v.real() < -2.5);
            CHECK(v.imag() == 0.0);
        }
    }
    // deterministic in the seed
    CHECK(zflow::make_disc_random({0.5, 3.0}, 0.1, 42).values == zflow::make_disc_random({0.5, 3.0}, 0.1, 42).values);
    CHECK(zflow::make_disc_random({0.5, 3.0}, 0.1, 42).values != zflow::make_disc_random({0.5, 3.0}, 0.1, 43).values);
}

TEST_CASE("heat semigroup") {
    SUBCASE("constants are fixed") {
        const auto c = GridField::constant({0.3, -1.2}, 32, 2);
        CHECK(sup_diff(zflow::heat_semigroup(c, 3.7), c) < 1e-14);
    }
    SUBCASE("single mode decays as an eigenfunction") {
        const double L = 5.0;
        const Complex a{0.7, 0.2};
        const auto f = zflow::make_fourier_field(0.0, {{{1, 0}, a}}, 32, 1, L);
        const double t = 0.3;
        const auto g = zflow::heat_semigroup(f, t);
        const double rate = std::pow(2.0 * std::numbers::pi / L, 2);
        const auto expect = zflow::make_fourier_field(0.0, {{{1, 0}, a * std::exp(-rate * t)}}, 32, 1, L);
        CHECK(sup_diff(g, expect) < 1e-14);
        CHECK(g.time == doctest::Approx(t));
    }
    SUBCASE("random field: mean preserved, energy decays at least like the lowest mode") {
        for (int dims : {1, 2}) {
            const auto f = zflow::make_disc_random({1.0, 1.0}, 0.8, 9, 32, dims);
            const auto g = zflow::heat_semigroup(f, 1.0);
            Complex mf{0.0, 0.0}, mg{0.0, 0.0};
            for (std::size_t i = 0; i < f.size(); ++i) {
                mf += f.values[i];
                mg += g.values[i];
            }
            CHECK(std::abs(mf - mg) < 1e-12 * f.size());
            CHECK(non_mean_energy(g) <= std::exp(-2.0) * non_mean_energy(f) * (1.0 + 1e-12));
        }
    }
    SUBCASE("identity at zero time and semigroup law") {
        const auto f = zflow::make_disc_random({0.0, 0.0}, 1.0, 5, 64);
        CHECK(sup_diff(zflow::heat_semigroup(f, 0.0), f) == 0.0);
        const auto two_step = zflow::heat_semigroup(zflow::heat_semigroup(f, 0.13), 0.41);
        CHECK(sup_diff(two_step, zflow::heat_semigroup(f, 0.54)) < 1e-14);
        CHECK_THROWS_AS(zflow::heat_semigroup(f, -1.0), zflow::DomainError);
    }
}

TEST_CASE("ETD step") {
    SUBCASE("constant field reduces to Heun's method") {
        const FlowConfig cfg;
        const Complex u0{2.5, 0.7};
        const double dt = 0.01;
        const auto step = zflow::etd_step(GridField::constant(u0), dt, cfg);
        const Complex k1 = cfg.field(u0);
        const Complex heun = u0 + 0.5 * dt * (k1 + cfg.field(u0 + dt * k1));
        for (const auto& v : step.values) CHECK(std::abs(v - heun) < 1e-13);
    }
    SUBCASE("constant field local error is third order") {
        FlowConfig ode = with_end(0.0);
        ode.rtol = 1e-13;
        ode.atol = 1e-15;
        const Complex u0{2.5, 0.7};
        std::vector<double> errs;
        for (double dt : {0.04, 0.02, 0.01}) {
            ode.t_end = dt;
            const Complex exact = zflow::integrate_flow(ode, u0).final().s;
            errs.push_back(std::abs(zflow::etd_step(GridField::constant(u0), dt, FlowConfig{}).values[0] - exact));
        }
        CHECK(errs[0] / errs[1] == doctest::Approx(8.0).epsilon(0.1));
        CHECK(errs[1] / errs[2] == doctest::Approx(8.0).epsilon(0.1));
    }
    SUBCASE("trivial zero is an exact equilibrium for both signs") {
        for (int lambda : {1, -1}) {
            const auto step = zflow::etd_step(GridField::constant(-2.0), 0.1, with_end(1.0, lambda));
            for (const auto& v : step.values) CHECK(std::abs(v + 2.0) < 1e-12);
        }
    }
    SUBCASE("second-order self-convergence") {
        const auto g = zflow::make_fourier_field({-3.0, 0.3}, {{{1, 0}, {0.4, 0.1}}, {{-2, 0}, {0.0, 0.2}}}, 32);
        const FlowConfig cfg = with_end(1.0);
        std::vector<GridField> finals;
        for (double dt : {0.1, 0.05, 0.025}) {
            PdeOptions o;
            o.dt = dt;
            finals.push_back(zflow::integrate_pde(g, cfg, o).final_field());
        }
        const double ratio = sup_diff(finals[0], finals[1]) / sup_diff(finals[1], finals[2]);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
    SUBCASE("pole guard raises a quench signal") {
        auto g = GridField::constant(3.0);
        g.values[5] = Complex{1.0002, 0.0};
        try {
            zflow::etd_step(g, 1e-3, FlowConfig{});
            FAIL("expected a quench signal");
        } catch (const zflow::QuenchSignal& q) {
            CHECK(q.index() == 5);
            CHECK(q.value() == Complex{1.0002, 0.0});
        }
    }
}

TEST_CASE("constant data reduce the PDE to the ODE") {
    const FlowConfig cfg = with_end(1.0);
    PdeOptions o;
    o.snapshot_every = 100;
    const auto run = zflow::integrate_pde(GridField::constant(2.0), cfg, o);
    CHECK(run.termination == PdeTermination::completed);
    REQUIRE(run.snapshots.size() == 11);
    FlowConfig ode = cfg;
    ode.rtol = 1e-12;
    ode.atol = 1e-14;
    double worst = 0.0;
    for (const auto& snap : run.snapshots) {
        ode.t_end = snap.time;
        const Complex ref = zflow::integrate_flow(ode, 2.0).final().s;
        for (const auto& v : snap.values) worst = std::max(worst, std::abs(v - ref));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("PDE runs: monitors and terminations") {
    SUBCASE("real data in (-10, -2) settle inside [-6, -2]") {
        const auto g = cosine_field(-5.0, 2.8);
        PdeOptions o;
        o.dt = 0.05;
        const auto run = zflow::integrate_pde(g, with_end(60.0), o);
        CHECK(run.termination == PdeTermination::completed);
        for (const auto& v : run.final_field().values) {
            CHECK(v.real() >= -6.0);
            CHECK(v.real() <= -2.0);
        }
        for (const auto& m : run.monitors) {
            CHECK(m.u2_min > -1e-10);
            CHECK(m.u2_max < 1e-10);
            CHECK(m.u1_min >= -8.0 - 1e-9);
            CHECK(m.u1_max <= -2.0 + 1e-9);
        }
    }
    SUBCASE("lambda = -1 quenches from 0.5") {
        const auto run = zflow::integrate_pde(GridField::constant(0.5), with_end(10.0, -1));
        CHECK(run.termination == PdeTermination::quenched);
        CHECK(run.monitors.back().min_p < 1e-3);
        CHECK(run.quench_index.has_value());
    }
    SUBCASE("quench from above the pole is caught despite overshoot") {
        const auto run = zflow::integrate_pde(GridField::constant(2.0), with_end(10.0, -1));
        CHECK(run.termination == PdeTermination::quenched);
        CHECK(run.monitors.back().min_p < 1e-3);
        CHECK(run.halvings > 0);
    }
    SUBCASE("quench monotonicity") {
        for (double c : {-1.5, -0.5, 0.0, 0.5}) {
            const auto g = cosine_field(c, 0.2, 1, 16);
            const auto run = zflow::integrate_pde(g, with_end(200.0, -1), PdeOptions{0.01});
            CAPTURE(c);
            REQUIRE(run.termination == PdeTermination::quenched);
            // eventually: after the lowest spatial mode has decayed by e^{-5}
            bool decreasing = true;
            for (std::size_t i = 1; i < run.monitors.size(); ++i)
                if (run.monitors[i - 1].t >= 5.0 || i > run.monitors.size() / 2)
                    decreasing = decreasing && run.monitors[i].min_p < run.monitors[i - 1].min_p;
            CHECK(decreasing);
        }
    }
    SUBCASE("norm escape") {
        PdeOptions o;
        o.dt = 0.05;
        o.escape_norm = 20.0;
        const auto run = zflow::integrate_pde(GridField::constant(3.0), with_end(100.0), o);
        CHECK(run.termination == PdeTermination::escaped);
        CHECK(run.monitors.back().sup_abs > 20.0);
    }
    SUBCASE("datum on the pole is rejected") {
        auto g = GridField::constant(3.0);
        g.values[0] = 1.0;
        CHECK_THROWS_AS(zflow::integrate_pde(g, with_end(1.0)), zflow::DomainError);
    }
    SUBCASE("snapshot cadence") {
        const auto run = zflow::integrate_pde(GridField::constant(3.0), with_end(1.0));
        CHECK(run.snapshots.size() == 201);
        CHECK(run.monitors.size() == 1001);
        CHECK(run.final_field().time == 1.0);
    }
    SUBCASE("runs are deterministic") {
        const auto g = zflow::make_disc_random({-2.0, 0.0}, 0.05, 11);
        const auto a = zflow::integrate_pde(g, with_end(2.0), PdeOptions{0.01});
        const auto b = zflow::integrate_pde(g, with_end(2.0), PdeOptions{0.01});
        CHECK(a.final_field().values == b.final_field().values);
    }
}

TEST_CASE("envelope spec from data") {
    const auto g = zflow::make_fourier_field(-5.0, {{{1, 0}, 1.25}, {{-1, 0}, 1.25}}, 16);
    const auto spec = zflow::envelope_spec_from(g);
    CHECK(spec.real_datum);
    CHECK(spec.i == doctest::Approx(-7.5));
    CHECK(spec.s == doctest::Approx(-2.5));
    CHECK(-2 * spec.k1 == -8);
    CHECK(-2 * spec.k2 == -2);
    CHECK(spec.n1 == 2);
    CHECK(spec.n2 == 1);
    const auto near = zflow::envelope_spec_from(cosine_field(-1.0, 0.5));
    CHECK(near.k1 == 1);
    CHECK(near.k2 == 0);
}

TEST_CASE("envelope checks") {
    SUBCASE("real datum above 1") {
        const auto g = GridField::constant(2.0);
        const auto run = zflow::integrate_pde(g, with_end(2.0));
        const auto rep = zflow::envelope_check(run, zflow::envelope_spec_from(g), Theorem::thm1_7i);
        CHECK(rep.pass);
        CHECK(rep.worst_margin >= -rep.slack);
        CHECK(rep.detail.find("1.6449") != std::string::npos);
    }
    SUBCASE("complex datum, general envelope and the real-character refinement") {
        // 2.2 + 0.2 cos x + i (0.4 + 0.1 sin 2x)
        const auto g = zflow::make_fourier_field(
            {2.2, 0.4}, {{{1, 0}, 0.1}, {{-1, 0}, 0.1}, {{2, 0}, 0.05}, {{-2, 0}, -0.05}}, 16);
        const auto spec = zflow::envelope_spec_from(g);
        CHECK(spec.i1 == doctest::Approx(2.0));
        CHECK(spec.i2 > 0.0);
        const auto run = zflow::integrate_pde(g, with_end(2.0), PdeOptions{0.01});
        const double slack = zflow::self_convergence_estimate(g, with_end(2.0), 0.01);
        const auto rep = zflow::envelope_check(run, spec, Theorem::thm1_5, slack);
        CHECK(rep.pass);
        CHECK(rep.detail.find("0.355") != std::string::npos);
        CHECK(zflow::envelope_check(run, spec, Theorem::cor1_6, slack).pass);
    }
    SUBCASE("real datum confined between trivial zeros") {
        const auto g = zflow::make_fourier_field(-5.0, {{{1, 0}, 1.25}, {{-1, 0}, 1.25}}, 16);
        const auto run = zflow::integrate_pde(g, with_end(20.0), PdeOptions{0.05});
        const auto spec = zflow::envelope_spec_from(g);
        CHECK(zflow::envelope_check(run, spec, Theorem::thm1_7ii).pass);
    }
    SUBCASE("violations are reported") {
        const auto g = GridField::constant(3.0);
        auto run = zflow::integrate_pde(g, with_end(1.0));
        run.snapshots[100].values[2] += 0.1;
        const auto rep = zflow::envelope_check(run, zflow::envelope_spec_from(g), Theorem::thm1_7i);
        CHECK_FALSE(rep.pass);
        CHECK(rep.worst_t == doctest::Approx(run.snapshots[100].time));
    }
    SUBCASE("hypotheses are enforced") {
        const auto low = GridField::constant(0.5);
        const auto run = zflow::integrate_pde(low, with_end(0.1));
        CHECK_THROWS_AS(zflow::envelope_check(run, zflow::envelope_spec_from(low), Theorem::thm1_7i),
                        zflow::ConfigError);
        const auto mid = GridField::constant({1.5, 0.2});
        const auto run2 = zflow::integrate_pde(mid, with_end(0.1));
        CHECK_THROWS_AS(zflow::envelope_check(run2, zflow::envelope_spec_from(mid), Theorem::thm1_5),
                        zflow::ConfigError);
        const auto neg = GridField::constant(-3.0);
        const auto run3 = zflow::integrate_pde(neg, with_end(0.1, -1));
        CHECK_THROWS_AS(zflow::envelope_check(run3, zflow::envelope_spec_from(neg), Theorem::thm1_7ii),
                        zflow::ConfigError);
        CHECK_THROWS_AS(zflow::parse_theorem("thm9"), zflow::ConfigError);
        CHECK(zflow::parse_theorem("thm1.7iii") == Theorem::thm1_7iii);
    }
}

TEST_CASE("stability of the trivial sink") {
    const auto z = zflow::classify_zero({-2.0, 0.0});
    SUBCASE("equilibrium datum converges at time zero") {
        const auto rep = zflow::stability_experiment(z, 0.05, GridField::constant(z.location), FlowConfig{});
        CHECK(rep.converged);
        CHECK(rep.convergence_time == 0.0);
    }
    SUBCASE("disc data are attracted") {
        zflow::StabilityOptions opts;
        opts.tol = 1e-3;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto g = zflow::make_disc_random(z.location, 0.05, seed);
            const auto rep = zflow::stability_experiment(z, 0.05, g, FlowConfig{}, opts);
            CHECK(rep.converged);
            CHECK(rep.monotone_after_transient);
            CHECK(rep.disc_contained);
            CHECK_FALSE(rep.escaped);
        }
    }
    SUBCASE("misuse") {
        const auto source = zflow::classify_zero({-4.0, 0.0});
        CHECK_THROWS_AS(zflow::stability_experiment(source, 0.05, GridField::constant(-4.0), FlowConfig{}),
                        zflow::ConfigError);
        CHECK_THROWS_AS(zflow::stability_experiment(z, 0.05, GridField::constant(-1.9), FlowConfig{}),
                        zflow::ConfigError);
    }
}

TEST_CASE("local solver constants") {
    const auto c = zflow::local_constants(4.0, 0.5, 1);
    CHECK(c.t_local > 0.0);
    CHECK(c.t_local == std::min({1.0 / (2.0 * c.m2), c.beta / (2.0 * c.m1), c.eps / (4.0 * c.m1)}));
    CHECK(c.z1 == doctest::Approx(2.0 + c.h1 + c.d1));
    const auto half = zflow::local_constants(4.0, 0.25, 1);
    CHECK(half.t_local <= c.t_local);
    const auto two = zflow::local_constants(4.0, 0.5, 2);
    CHECK(two.m1 / c.m1 == doctest::Approx(std::pow(2.0, 5.0) * two.z1 / c.z1));
    CHECK(two.m1 >= std::pow(2.0, 5.0) * c.m1 * (two.z1 / c.z1) * (1.0 - 1e-12));
    CHECK_THROWS_AS(zflow::local_constants(0.0, 0.5, 1), zflow::ConfigError);
}

TEST_CASE("Picard iteration") {
    SUBCASE("trivial zero is a fixed point") {
        const auto g = GridField::constant(-2.0);
        const auto c = zflow::local_constants(4.0, 1.0, 1);
        const auto res = zflow::picard_local_solve(g, c, 5, FlowConfig{});
        for (const auto& v : res.solution.values) CHECK(std::abs(v + 2.0) < 1e-14);
    }
    SUBCASE("constant datum matches the ETD march") {
        const auto g = GridField::constant(3.0);
        const auto c = zflow::local_constants(6.0, 2.0 / 3.0, 1);
        const auto res = zflow::picard_local_solve(g, c, 10, FlowConfig{});
        CHECK(res.contracted);
        CHECK(res.etd_difference < 1e-5);
        CHECK(res.solution.time == doctest::Approx(c.t_local));
    }
    SUBCASE("longer interval: contraction and quadrature against the march") {
        const auto g = zflow::make_fourier_field({3.0, 0.2}, {{{1, 0}, 0.1}, {{-2, 0}, {0.0, 0.05}}}, 32);
        auto c = zflow::local_constants(8.0, 0.5, 1);
        c.t_local = 0.05;
        const auto res = zflow::picard_local_solve(g, c, 12, FlowConfig{});
        CHECK(res.contracted);
        CHECK(res.ratios.size() >= 2);
        for (double r : res.ratios) CHECK(r <= 0.5);
        CHECK(res.etd_difference < 1e-5);
    }
    SUBCASE("inadmissible data are rejected") {
        const auto c = zflow::local_constants(4.0, 0.5, 1);
        CHECK_THROWS_AS(zflow::picard_local_solve(GridField::constant(3.0), c, 3, FlowConfig{}), zflow::ConfigError);
        CHECK_THROWS_AS(zflow::picard_local_solve(GridField::constant(1.5), c, 3, FlowConfig{}), zflow::ConfigError);
    }
}
