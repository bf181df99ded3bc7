#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "zflow/special_fn.hpp"

using zflow::Complex;
using zflow::EvalConfig;
using zflow::EvalPath;
constexpr double kPi = std::numbers::pi;

namespace {

// Independent oracle for Re s > 1: brute-force partial sum, integral tail, midpoint and one Bernoulli correction.
Complex series_oracle(Complex s, double alpha) {
    constexpr int n = 4000;
    Complex sum{0.0, 0.0};
    for (int k = n - 1; k >= 0; --k) sum += std::pow(Complex{k + alpha, 0.0}, -s);
    const double a = n + alpha;
    const Complex tail = std::pow(Complex{a, 0.0}, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Complex{a, 0.0}, -s) +
                         s / 12.0 * std::pow(Complex{a, 0.0}, -s - 1.0);
    return sum + tail;
}

double zeta3_series() {
    double acc = 0.0;
    for (int k = 200000; k >= 1; --k) acc += 1.0 / (double(k) * k * k);
    return acc + 1.0 / (2.0 * 200000.5 * 200000.5);
}

double zeta5_series() {
    double acc = 0.0;
    for (int k = 2000; k >= 1; --k) acc += std::pow(double(k), -5.0);
    return acc + std::pow(2000.5, -4.0) / 4.0;
}

void check_close(Complex got, Complex want, double tol) {
    CAPTURE(got);
    CAPTURE(want);
    CHECK(std::abs(got - want) < tol);
}

}  // namespace

TEST_CASE("eval config validation") {
    EvalConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.trunc_threshold = cfg.abs_tol;
    CHECK_THROWS_AS(cfg.validate(), zflow::ConfigError);
    cfg = EvalConfig{};
    cfg.series_cutoff_sigma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), zflow::ConfigError);
    cfg = EvalConfig{};
    cfg.abs_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), zflow::ConfigError);
}

TEST_CASE("hermite_d") {
    check_close(zflow::hermite_d({3.0, 0.0}, 1.0), 0.5, 1e-15);
    check_close(zflow::hermite_d({1.0, 0.0}, 1.0), 0.5, 1e-15);
    // removable singularity: -ln(alpha) + 1/(2 alpha)
    check_close(zflow::hermite_d({1.0, 0.0}, 0.25), -std::log(0.25) + 2.0, 1e-14);
    // continuity across the series switch radius
    const double a = 0.3;
    const Complex near{1.0 + 0.49 / -std::log(a), 0.0};
    const Complex far{1.0 + 0.51 / -std::log(a), 0.0};
    const auto closed = [a](Complex s) {
        return (std::pow(Complex{a, 0.0}, 1.0 - s) - 1.0) / (s - 1.0) + 0.5 * std::pow(Complex{a, 0.0}, -s);
    };
    check_close(zflow::hermite_d(near, a), closed(near), 1e-13);
    check_close(zflow::hermite_d(far, a), closed(far), 1e-13);

    // d(2, 1/2) = zeta(2, 1/2) - 1 - h(2, 1/2), zeta(2, 1/2) from the series oracle
    const Complex lhs = zflow::hermite_d({2.0, 0.0}, 0.5);
    const Complex rhs = series_oracle({2.0, 0.0}, 0.5) - 1.0 - zflow::hermite_h({2.0, 0.0}, 0.5);
    check_close(lhs, rhs, 1e-10);

    CHECK_THROWS_AS(zflow::hermite_d({2.0, 0.0}, 0.0), zflow::DomainError);
    CHECK_THROWS_AS(zflow::hermite_d({2.0, 0.0}, 1.5), zflow::DomainError);
}

TEST_CASE("hermite_h") {
    check_close(zflow::hermite_h({0.0, 0.0}, 1.0), 0.0, 1e-15);
    check_close(zflow::hermite_h({2.0, 0.0}, 1.0), kPi * kPi / 6.0 - 1.5, 1e-10);

    // assembled zeta vanishes at the first nontrivial zero
    const Complex rho{0.5, 14.134725141734693790};
    const Complex assembled = 1.0 / (rho - 1.0) + zflow::hermite_d(rho, 1.0) + zflow::hermite_h(rho, 1.0);
    CHECK(std::abs(assembled) < 1e-9);
    CHECK(zflow::select_path(rho, 1.0) == EvalPath::hermite);

    EvalConfig tight;
    tight.quad_max_refinements = 1;
    CHECK_THROWS_AS(zflow::hermite_h({0.5, 14.0}, 0.1, tight), zflow::AccuracyError);
}

TEST_CASE("hurwitz_zeta spec values") {
    check_close(zflow::hurwitz_zeta({2.0, 0.0}, 0.5), kPi * kPi / 2.0, 1e-10);
    check_close(zflow::hurwitz_zeta({-2.0, 0.0}, 1.0), 0.0, 1e-10);
    check_close(zflow::hurwitz_zeta({3.0, 4.0}, 1.0), series_oracle({3.0, 4.0}, 1.0), 1e-10);
    CHECK_THROWS_AS(zflow::hurwitz_zeta({1.0, 0.0}, 0.5), zflow::PoleError);
    CHECK_THROWS_AS(zflow::hurwitz_zeta({2.0, 0.0}, -0.5), zflow::DomainError);
}

TEST_CASE("hurwitz_zeta against mpmath reference values") {
    struct Ref {
        Complex s;
        double alpha;
        Complex value;
        Complex deriv;
    };
    // mpmath.zeta(s, a) and mpmath.zeta(s, a, 1) at 25 digits
    const std::vector<Ref> refs = {
        {{3.0, 4.0}, 1.0, {0.890554906965073258, -0.00807594542432725985}, {0.067545526282673304, -0.00662930224921904357}},
        {{-1.5, 2.0}, 0.25, {-0.0643432237600790376, -0.141267293153175694}, {-0.180919717850591566, -0.071800636037589197}},
        {{0.3, -2.7}, 0.5, {-0.495824455910659926, -0.717220244824713132}, {-0.187881079959166059, -0.779243458063489355}},
        {{0.5, 100.0}, 1.0, {2.69261988568132409, -0.0203860296025981618}, {-3.72731270964464824, -0.194228702573743233}},
        {{0.5, 250.0}, 1.0, {0.420737392203992508, 0.816619497760183014}, {0.728436427503675018, -2.27859497310224216}},
        {{-2.5, 0.7}, 1.0, {0.0163426246669584709, -0.00167571851939171531}, {0.00512559022744804328, -0.021109033631253112}},
        {{-9.3, 0.2}, 1.0, {-0.00812123503279754811, -0.0005277515497480461}, {-0.00244878010630501422, 0.00446776646409517125}},
        {{1.2, 30.0}, 0.5, {-0.089051684117223259, 1.98302681502044461}, {-1.20087587984200643, 1.84538052445800269}},
        {{2.5, -1.0}, 0.75, {2.20030589299868043, -0.292223300832154336}, {0.46642420257899145, -0.454992852203019547}},
    };
    for (const auto& r : refs) {
        CAPTURE(r.s);
        CAPTURE(r.alpha);
        check_close(zflow::hurwitz_zeta(r.s, r.alpha), r.value, 1e-9);
        check_close(zflow::hurwitz_zeta_deriv(r.s, r.alpha), r.deriv, 1e-8);
    }
}

TEST_CASE("riemann_zeta") {
    check_close(zflow::riemann_zeta({2.0, 0.0}), kPi * kPi / 6.0, 1e-10);
    for (int k = 1; k <= 6; ++k) check_close(zflow::riemann_zeta({-2.0 * k, 0.0}), 0.0, 1e-10);
    // the root of zeta(sigma) = 2 lies within 0.02 of 1.71
    double lo = 1.5, hi = 2.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (zflow::riemann_zeta({mid, 0.0}).real() > 2.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(lo - 1.71) < 0.02);
    CHECK_THROWS_AS(zflow::riemann_zeta({1.0, 0.0}), zflow::PoleError);
}

TEST_CASE("hurwitz_zeta_deriv at trivial zeros") {
    // zeta'(-2n) = (-1)^n n (2n-1)! / (2 pi)^{2n} zeta(2n+1)
    const double z3 = zeta3_series();
    const double z5 = zeta5_series();
    const double d2 = -1.0 * 1.0 * 1.0 / std::pow(2.0 * kPi, 2) * z3;
    const double d4 = 2.0 * 6.0 / std::pow(2.0 * kPi, 4) * z5;
    check_close(zflow::riemann_zeta_deriv({-2.0, 0.0}), d2, 1e-9);
    check_close(zflow::riemann_zeta_deriv({-4.0, 0.0}), d4, 1e-9);
    CHECK(d2 == doctest::Approx(-0.030448).epsilon(1e-4));
    CHECK(d4 == doctest::Approx(0.007983).epsilon(1e-3));

    const double h = 1e-5;
    const Complex fd = (zflow::riemann_zeta({2.0 + h, 0.0}) - zflow::riemann_zeta({2.0 - h, 0.0})) / (2.0 * h);
    check_close(zflow::riemann_zeta_deriv({2.0, 0.0}), fd, 1e-6);
}

TEST_CASE("paths agree where both are accurate") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(2.0, 7.0), im(-6.0, 6.0);
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (int i = 0; i < 30; ++i) {
            const Complex s{re(rng), im(rng)};
            const auto herm = zflow::hurwitz_zeta_via(EvalPath::hermite, s, alpha);
            const auto em = zflow::hurwitz_zeta_via(EvalPath::euler_maclaurin, s, alpha);
            CAPTURE(s);
            CHECK(std::abs(herm.value - em.value) < 1e-10);
            CHECK(std::abs(herm.value - series_oracle(s, alpha)) < 1e-10);
        }
    }
    // series path above the cutoff
    const Complex s{9.0, 3.0};
    CHECK(zflow::select_path(s, 1.0) == EvalPath::series);
    check_close(zflow::hurwitz_zeta(s, 1.0), zflow::hurwitz_zeta_via(EvalPath::hermite, s, 1.0).value, 1e-10);
}

TEST_CASE("decomposition and derivative properties on [-3,3]^2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    const EvalConfig cfg;
    int sampled = 0;
    while (sampled < 200) {
        const Complex s{coord(rng), coord(rng)};
        if (std::abs(s - 1.0) <= 0.1) continue;
        ++sampled;
        for (double alpha : {0.25, 0.5, 1.0}) {
            CAPTURE(s);
            CAPTURE(alpha);
            const Complex z = zflow::hurwitz_zeta(s, alpha, cfg);
            const Complex assembled = 1.0 / (s - 1.0) + zflow::hermite_d(s, alpha) + zflow::hermite_h(s, alpha, cfg);
            CHECK(std::abs(z - assembled) < 2.0 * cfg.abs_tol);

            const double h = 1e-5;
            const Complex fd =
                (zflow::hurwitz_zeta(s + h, alpha, cfg) - zflow::hurwitz_zeta(s - h, alpha, cfg)) / (2.0 * h);
            CHECK(std::abs(zflow::hurwitz_zeta_deriv(s, alpha, cfg) - fd) < std::max(1e-6, 100.0 * cfg.abs_tol));

            // real coefficients: conjugate symmetry
            CHECK(std::abs(zflow::hurwitz_zeta(std::conj(s), alpha, cfg) - std::conj(z)) < 1e-12);
        }
    }
}

TEST_CASE("bound constants") {
    CHECK(zflow::e_const(1.0) == doctest::Approx(12.0 * std::exp(1.0)));
    CHECK(zflow::e_const(1.0) == doctest::Approx(32.6194).epsilon(1e-5));

    const auto c = zflow::bound_constants(1.0, 2.0);
    const double a = (1.0 / (2.0 * kPi)) * 2.0 * (2.0 + std::sinh(2.0));
    const double b = (kPi + std::sinh(kPi)) * (3.0 / kPi + 2.0 * 2.0 / std::pow(kPi, 3) + 2.0 / std::pow(kPi, 3));
    CHECK(c.a_ab == doctest::Approx(a).epsilon(1e-14));
    CHECK(c.b_b == doctest::Approx(b).epsilon(1e-14));
    CHECK(c.h1 == doctest::Approx(2.0 * (a + b)).epsilon(1e-14));
    CHECK(c.h1 == doctest::Approx(37.3).epsilon(2e-3));
    CHECK(c.d2 == 0.0);
    CHECK(c.h2 > 0.0);

    CHECK(zflow::bound_constants(0.5, 1.0).h1 >= zflow::bound_constants(0.9, 1.0).h1);
    double prev = 1e300;
    for (int i = 1; i <= 10; ++i) {
        const double h1 = zflow::bound_constants(0.1 * i, 2.0).h1;
        CHECK(h1 <= prev);
        prev = h1;
    }
    const auto half = zflow::bound_constants(0.5, 1.0);
    const double L = std::log(2.0);
    CHECK(half.d2 == doctest::Approx(L * L * zflow::e_const(2.0 * L) + L / (2.0 * 0.5)));
    CHECK_THROWS_AS(zflow::bound_constants(0.0, 1.0), zflow::DomainError);
    CHECK_THROWS_AS(zflow::bound_constants(0.5, -1.0), zflow::DomainError);
}

TEST_CASE("sampled sups stay below the closed-form bounds") {
    const EvalConfig cfg;
    for (double alpha : {0.25, 0.5, 1.0}) {
        const double beta = 2.0;
        const auto c = zflow::bound_constants(alpha, beta);
        double sup_h = 0.0, sup_hd = 0.0, sup_dd = 0.0;
        for (int i = 0; i < 41; ++i) {
            for (int j = 0; j < 41; ++j) {
                const Complex s{-beta + 0.1 * i, -beta + 0.1 * j};
                sup_h = std::max(sup_h, std::abs(zflow::hermite_h(s, alpha, cfg)));
                if (i % 4 == 0 && j % 4 == 0) {
                    sup_hd = std::max(sup_hd, std::abs(zflow::hermite_h_deriv(s, alpha, cfg)));
                    sup_dd = std::max(sup_dd, std::abs(zflow::hermite_d_deriv(s, alpha)));
                }
            }
        }
        CAPTURE(alpha);
        CHECK(sup_h <= c.h1);
        CHECK(sup_hd <= c.h2);
        if (alpha < 1.0) CHECK(sup_dd <= c.d2);
        CHECK(zflow::d1_numeric(alpha, beta) > 0.0);
    }
    for (double r : {0.5, 1.0, 2.0}) {
        double sup = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double u = -r + 2.0 * r * i / 400.0;
            for (Complex z : {Complex{u, -r}, Complex{u, r}, Complex{-r, u}, Complex{r, u}})
                sup = std::max(sup, std::abs(zflow::expm1_ratio_deriv(z)));
        }
        CAPTURE(r);
        CHECK(sup <= zflow::e_const(r));
    }
}
