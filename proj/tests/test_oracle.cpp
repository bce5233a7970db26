#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "ceit/errors.hpp"
#include "ceit/model.hpp"
#include "ceit/oracle.hpp"
#include "ceit/params.hpp"

using namespace ceit;
using oracle::BlochScheme;
using oracle::QuadratureConfig;
using cd = std::complex<double>;

namespace {

AtomParams eit_atoms() {
    AtomParams a;
    a.g_n = 13.5e6;
    a.gamma = 12.6e6;
    a.gamma0 = 600.0;
    return a;
}

AtomParams switch_atoms() {
    AtomParams a;
    a.g_n = 17.0e6;
    a.gamma = 12.6e6;
    a.gamma0 = 600.0;
    a.gamma_s = 11.0e6;
    return a;
}

DriveParams switch_drive(double omega_s) {
    DriveParams d;
    d.omega_c = 4.2e6;
    d.omega_s = omega_s;
    d.delta_s = -4.3e9;
    return d;
}

std::vector<double> grid(std::size_t n, double span) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = -span + 2.0 * span * double(i) / double(n - 1);
    return g;
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("transverse average integrates known profiles") {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-14;
    cfg.rel_tol = 1e-12;

    // local(u) = c u  ->  integral of c du = c
    const cd c{0.7, -1.3};
    auto lin = oracle::transverse_average([&](double u) { return c * u; }, cfg);
    CHECK(std::abs(lin.value - c) < 1e-12);
    CHECK(lin.intervals >= 1);

    // local(u) = u^2  ->  integral of u du = 1/2
    auto quad = oracle::transverse_average([](double u) { return cd{u * u, 0.0}; }, cfg);
    CHECK(quad.value.real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(quad.value.imag() == 0.0);
    CHECK(quad.error < 1e-10);
}

TEST_CASE("quadrature oracle reproduces the closed-form line shapes") {
    const auto deltas = grid(401, 3.0 * 12.6e6);

    SUBCASE("plain transparency line") {
        const AtomParams a = eit_atoms();
        DriveParams d;
        d.omega_c = 4.1e6;
        for (double delta : deltas) {
            const cd closed = chi_eit(a, d.omega_c, delta);
            const cd averaged = oracle::chi_quad(Mode::eit, a, d, delta);
            CHECK(rel(averaged, closed) <= 1e-6);
        }
    }

    SUBCASE("strongly driven switch line") {
        const AtomParams a = switch_atoms();
        const DriveParams d = switch_drive(70e6);
        for (double delta : deltas) {
            const cd closed = chi_switch(a, d, delta);
            const cd averaged = oracle::chi_quad(Mode::switching, a, d, delta);
            CHECK(rel(averaged, closed) <= 1e-6);
        }
    }
}

TEST_CASE("Bloch steady state matches the closed-form local response") {
    const double omega_p = 1.0;

    SUBCASE("three-level scheme against the transparency slice") {
        const AtomParams a = eit_atoms();
        DriveParams d;
        d.omega_c = 4.1e6;
        for (double delta : {0.0, 1.0e4, -2.2e6, 1.26e7, -3.0e7}) {
            for (double u : {1.0, 0.7, 0.31, 0.05, 0.001}) {
                const cd bloch =
                    oracle::bloch_chi_local(BlochScheme::lambda3, a, d, omega_p, delta, u);
                const cd closed = chi_local_eit(a, d.omega_c, delta, u);
                CHECK(rel(bloch, closed) <= 1e-10);
            }
        }
    }

    SUBCASE("four-level scheme against the switch slice") {
        const AtomParams a = switch_atoms();
        const DriveParams d = switch_drive(42e6);
        for (double delta : {0.0, 5.0e5, -1.26e7, 2.9e7}) {
            for (double u : {1.0, 0.5, 0.09}) {
                const cd bloch =
                    oracle::bloch_chi_local(BlochScheme::lambda4, a, d, omega_p, delta, u);
                const cd closed = chi_local_switch(a, d, delta, u);
                CHECK(rel(bloch, closed) <= 1e-10);
            }
        }
    }

    SUBCASE("coupling off reduces to the two-level line") {
        const AtomParams a = eit_atoms();
        DriveParams d; // omega_c = 0
        for (double delta : {0.0, 3.3e6, -1.9e7}) {
            const cd bloch =
                oracle::bloch_chi_local(BlochScheme::lambda3, a, d, omega_p, delta, 1.0);
            CHECK(rel(bloch, chi_two_level(a, delta)) <= 1e-12);
        }
    }
}

TEST_CASE("Bloch response is linear in the probe") {
    const AtomParams a = eit_atoms();
    DriveParams d;
    d.omega_c = 4.1e6;
    const auto r1 = oracle::bloch_steady_state(BlochScheme::lambda3, a, d, 1.0, 2.2e6);
    const auto r2 = oracle::bloch_steady_state(BlochScheme::lambda3, a, d, 2.0, 2.2e6);
    const auto r3 = oracle::bloch_steady_state(BlochScheme::lambda3, a, d, 12.6, 2.2e6);
    CHECK(rel(r2.chi, r1.chi) <= 1e-12);
    CHECK(rel(r3.chi, r1.chi) <= 1e-10);
    // the coherence itself scales with the probe
    CHECK(rel(r2.coherence, 2.0 * r1.coherence) <= 1e-12);
}

TEST_CASE("Bloch solve guards its domain") {
    const AtomParams a = eit_atoms();
    DriveParams d;
    d.omega_c = 4.1e6;

    SUBCASE("probe amplitude window") {
        using oracle::bloch_steady_state;
        CHECK_THROWS_AS(bloch_steady_state(BlochScheme::lambda3, a, d, 0.0, 0.0),
                        model_error);
        CHECK_THROWS_AS(bloch_steady_state(BlochScheme::lambda3, a, d, -1.0, 0.0),
                        model_error);
        CHECK_THROWS_AS(
            bloch_steady_state(BlochScheme::lambda3, a, d, 2e-3 * a.gamma, 0.0),
            model_error);
        CHECK_NOTHROW(
            bloch_steady_state(BlochScheme::lambda3, a, d, 1e-3 * a.gamma, 0.0));
    }

    SUBCASE("transverse weight window") {
        CHECK_THROWS_AS(
            oracle::bloch_chi_local(BlochScheme::lambda3, a, d, 1.0, 0.0, 0.0),
            model_error);
        CHECK_THROWS_AS(
            oracle::bloch_chi_local(BlochScheme::lambda3, a, d, 1.0, 0.0, 1.5),
            model_error);
    }

    SUBCASE("ill-conditioned system is refused, not mangled") {
        AtomParams bad = eit_atoms();
        bad.gamma0 = 1e-12;
        DriveParams off; // omega_c = 0 leaves the ground coherence decoupled
        CHECK_THROWS_AS(
            oracle::bloch_steady_state(BlochScheme::lambda3, bad, off, 1.0, 0.0),
            singular_system_error);

        bad.gamma_s = 11e6;
        DriveParams off4 = switch_drive(0.0);
        off4.omega_c = 0.0;
        CHECK_THROWS_AS(
            oracle::bloch_steady_state(BlochScheme::lambda4, bad, off4, 1.0, 0.0),
            singular_system_error);

        // with the coupling on, the same gamma0 is perfectly solvable
        CHECK_NOTHROW(oracle::bloch_steady_state(BlochScheme::lambda3, bad, d, 1.0, 0.0));
    }
}

TEST_CASE("quadrature tolerances are enforced and reported") {
    auto integrand = [](double u) { return cd{u / (1.0 + 5.0 * u), 0.0}; };

    SUBCASE("tightening the tolerance tightens the estimate") {
        QuadratureConfig loose, tight;
        loose.rel_tol = 1e-4;
        tight.rel_tol = 1e-12;
        const auto rl = oracle::transverse_average(integrand, loose);
        const auto rt = oracle::transverse_average(integrand, tight);
        CHECK(rt.error <= rl.error);
        CHECK(rt.intervals >= rl.intervals);
        // analytic value: 1/5 - ln(6/1)/25 ... integral of 1/(1+5u) du = ln(6)/5
        const double want = std::log(6.0) / 5.0;
        CHECK(rt.value.real() == doctest::Approx(want).epsilon(1e-12));
    }

    SUBCASE("unreachable tolerance raises quadrature_error") {
        QuadratureConfig cfg;
        cfg.abs_tol = 0.0;
        cfg.rel_tol = 1e-30;
        cfg.max_subdivisions = 8;
        CHECK_THROWS_AS(oracle::transverse_average(integrand, cfg), quadrature_error);
    }

    SUBCASE("config validation") {
        QuadratureConfig cfg;
        cfg.rel_tol = 0.0;
        CHECK_THROWS_AS(oracle::transverse_average(integrand, cfg), model_error);
        cfg.rel_tol = 1e-8;
        cfg.max_subdivisions = 4;
        CHECK_THROWS_AS(oracle::transverse_average(integrand, cfg), model_error);
    }

    SUBCASE("mode restrictions on the chi wrappers") {
        const AtomParams a = eit_atoms();
        DriveParams d;
        d.omega_c = 4.1e6;
        CHECK_THROWS_AS(oracle::chi_quad(Mode::bare, a, d, 0.0), model_error);
        CHECK_THROWS_AS(oracle::chi_quad(Mode::two_level, a, d, 0.0), model_error);
        CHECK_THROWS_AS(oracle::chi_bloch_quad(Mode::bare, a, d, 1.0, 0.0), model_error);
    }
}

TEST_CASE("oracle report aggregates per-detuning deviations") {
    const AtomParams a = eit_atoms();
    DriveParams d;
    d.omega_c = 4.1e6;
    const auto deltas = grid(21, 2.0 * a.gamma);

    const auto rep = oracle::oracle_report(Mode::eit, a, d, deltas);
    REQUIRE(rep.rows.size() == deltas.size());
    double max_q = 0.0, sum_q = 0.0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].delta == deltas[i]);
        CHECK(rep.rows[i].rel_quad >= 0.0);
        CHECK(rep.rows[i].rel_bloch >= 0.0);
        max_q = std::max(max_q, rep.rows[i].rel_quad);
        sum_q += rep.rows[i].rel_quad;
    }
    CHECK(rep.max_rel_quad == max_q);
    CHECK(rep.mean_rel_quad == doctest::Approx(sum_q / double(deltas.size())).epsilon(1e-14));
    CHECK(rep.max_rel_quad <= 1e-6);
    CHECK(rep.max_rel_bloch <= 1e-6);
    CHECK(rep.max_rel_quad >= rep.mean_rel_quad);

    CHECK_THROWS_AS(oracle::oracle_report(Mode::eit, a, d, {}), model_error);
}
