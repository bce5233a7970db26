// Acceptance gate: each test case is one release criterion and prints exactly
// one PASS/FAIL line through the listener below. Run via ctest or directly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "ceit/features.hpp"
#include "ceit/fitting.hpp"
#include "ceit/io.hpp"
#include "ceit/model.hpp"
#include "ceit/oracle.hpp"
#include "ceit/spectra.hpp"

#include "test_util.hpp"

using namespace ceit;

namespace {

struct CriterionLines : doctest::IReporter {
    const doctest::TestCaseData* cur = nullptr;
    explicit CriterionLines(const doctest::ContextOptions&) {}
    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats&) override {}
    void test_case_start(const doctest::TestCaseData& tc) override { cur = &tc; }
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_end(const doctest::CurrentTestCaseStats& st) override {
        if (cur)
            std::printf("%s: %s\n", cur->m_name, st.testCaseSuccess ? "PASS" : "FAIL");
        cur = nullptr;
    }
    void test_case_exception(const doctest::TestCaseException&) override {}
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData&) override {}
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

REGISTER_LISTENER("criterion-lines", 1, CriterionLines);

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

CavityParams headline_cavity() {
    CavityParams c;
    c.kappa = 2.2e6;
    c.kappa_in = 2.2e6 * (1500.0 / 2154.0);
    c.tau = 1.0;
    return c;
}

AtomParams eit_atoms(double g_n = 13.5e6) {
    AtomParams a;
    a.g_n = g_n;
    a.gamma = 12.6e6;
    a.gamma0 = 600.0;
    return a;
}

AtomParams switch_atoms() {
    AtomParams a;
    a.g_n = 17e6;
    a.gamma = 12.6e6;
    a.gamma0 = 600.0;
    a.gamma_s = 11e6;
    return a;
}

DriveParams eit_drive(double omega_c) {
    DriveParams d;
    d.omega_c = omega_c;
    return d;
}

DriveParams switch_drive(double omega_s) {
    DriveParams d;
    d.omega_c = 4.2e6;
    d.omega_s = omega_s;
    d.delta_s = -4.3e9;
    return d;
}

double c54_g_n() { return std::sqrt(2.0 * 5.4 * 2.2e6 * 12.6e6); }

} // namespace

TEST_CASE("criterion 1: cooperativity") {
    const AtomParams a = eit_atoms(13.8e6);
    const CavityParams c = headline_cavity();

    const auto t0 = clock_type::now();
    const double C = cooperativity(c, a);
    const double elapsed = seconds_since(t0);

    CHECK(std::fabs(C - 3.435) <= 0.01);
    CHECK(std::fabs(C - 3.435064935064935) <= 1e-12);
    CHECK(elapsed < 1e-3);
}

TEST_CASE("criterion 2: two-level floor") {
    const AtomParams a = eit_atoms(13.8e6);
    const double C = cooperativity(headline_cavity(), a);
    const double floor = 1.0 / ((1.0 + 2.0 * C) * (1.0 + 2.0 * C));

    CHECK(std::fabs(floor - 0.01614493132481565) <= 1e-6);
    CHECK(std::fabs(floor - 0.02) <= 0.01);
}

TEST_CASE("criterion 3: dephasing band") {
    const CavityParams c = headline_cavity();
    const DriveParams d = eit_drive(4.1e6);

    AtomParams lo_dephasing = eit_atoms();
    lo_dephasing.gamma0 = 300.0;
    AtomParams mid = eit_atoms(); // gamma0 = 600
    AtomParams hi_dephasing = eit_atoms();
    hi_dephasing.gamma0 = 1100.0;

    const double high = extract_max_transparency(c, lo_dephasing, d, Mode::eit).value;
    const double center = extract_max_transparency(c, mid, d, Mode::eit).value;
    const double low = extract_max_transparency(c, hi_dephasing, d, Mode::eit).value;

    CHECK(std::fabs(high - 0.95) <= 0.01);
    CHECK(std::fabs(low - 0.87) <= 0.01);
    CHECK(std::fabs(0.84 - low) <= 0.04);
    CHECK(low < center);
    CHECK(center < high);
}

TEST_CASE("criterion 4: window scaling") {
    const auto t0 = clock_type::now();
    const CavityParams c = headline_cavity();
    const AtomParams a = eit_atoms(c54_g_n());

    const std::vector<double> omega_c = {1.3e6, 3.0e6, 4.1e6, 6.6e6, 8.6e6};
    std::vector<double> hwhm, oc2;
    for (double oc : omega_c) {
        hwhm.push_back(extract_hwhm(c, a, eit_drive(oc)));
        oc2.push_back(oc * oc);
    }
    for (std::size_t i = 1; i < hwhm.size(); ++i)
        CHECK(hwhm[i] > hwhm[i - 1]);
    CHECK(linfit_r2(oc2, hwhm) >= 0.99);

    const double headline = extract_hwhm(c, eit_atoms(), eit_drive(4.1e6));
    CHECK(headline >= 10e3);
    CHECK(headline <= 160e3);

    CHECK(seconds_since(t0) < 5.0);
}

TEST_CASE("criterion 5: oracle agreement") {
    const auto t0 = clock_type::now();
    DetuningGrid grid;
    grid.start = -3.0 * 12.6e6;
    grid.stop = 3.0 * 12.6e6;
    grid.points = 2001;
    const oracle::QuadratureConfig quad;
    const double omega_p = 1.0;

    struct Set {
        Mode mode;
        AtomParams atoms;
        DriveParams drive;
    };
    const std::vector<Set> sets = {
        {Mode::eit, eit_atoms(), eit_drive(4.1e6)},
        {Mode::eit, eit_atoms(c54_g_n()), eit_drive(8.6e6)},
        {Mode::switching, switch_atoms(), switch_drive(70e6)},
    };
    for (const Set& s : sets) {
        const oracle::OracleReport rep =
            oracle::oracle_report(s.mode, s.atoms, s.drive, grid.deltas(), quad, omega_p);
        CHECK(rep.rows.size() == 2001);
        CHECK(rep.max_rel_quad <= 1e-6);
        CHECK(rep.max_rel_bloch <= 1e-6);
    }
    CHECK(seconds_since(t0) < 10.0);
}

TEST_CASE("criterion 6: mode reductions") {
    const AtomParams sw = switch_atoms();
    const AtomParams tl = eit_atoms(13.8e6);

    // the switching response with the control beam off is the EIT response
    for (int i = 0; i <= 500; ++i) {
        const double delta = -30e6 + 60e6 * i / 500.0;
        const std::complex<double> a = chi_switch(sw, switch_drive(0.0), delta);
        DriveParams d = switch_drive(0.0);
        d.omega_c = 4.2e6;
        const std::complex<double> b = chi_eit(sw, d.omega_c, delta);
        CHECK(a.real() == b.real());
        CHECK(a.imag() == b.imag());
    }

    // EIT with the coupling off collapses to the two-level response
    for (int i = 0; i <= 100; ++i) {
        const double delta = -30e6 + 60e6 * i / 100.0;
        const std::complex<double> a = chi_eit(tl, 0.0, delta);
        const std::complex<double> b = chi_two_level(tl, delta);
        CHECK(a.real() == b.real());
        CHECK(a.imag() == b.imag());
        const std::complex<double> weak = chi_eit(tl, 100.0, delta);
        CHECK(std::abs(weak - b) <= 1e-6 * std::abs(b));
    }

    // on resonance the two-level susceptibility reproduces the cooperativity
    const CavityParams c = headline_cavity();
    const double lhs = chi_two_level(tl, 0.0).imag() / c.kappa;
    const double rhs = 2.0 * cooperativity(c, tl);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::fabs(rhs));
}

TEST_CASE("criterion 7: switching response") {
    const CavityParams c = headline_cavity();
    const AtomParams a = switch_atoms();

    CHECK(extract_resonance_shift(c, a, switch_drive(0.0)) == 0.0);

    const std::vector<double> omega_s = {24e6, 42e6, 70e6};
    const std::vector<double> frozen = {-130.5e3, -399.7e3, -1110.0e3};
    std::vector<double> shift, os2;
    for (std::size_t i = 0; i < omega_s.size(); ++i) {
        shift.push_back(extract_resonance_shift(c, a, switch_drive(omega_s[i])));
        os2.push_back(omega_s[i] * omega_s[i]);
        CHECK(shift[i] < 0.0);
        CHECK(std::fabs(shift[i] - frozen[i]) <= 2e3);
    }
    CHECK(linfit_r2(os2, shift) >= 0.99);

    const std::vector<double> want_t0 = {0.887, 0.182, 0.031, 0.011};
    double prev = 2.0;
    const std::vector<double> all_os = {0.0, 24e6, 42e6, 70e6};
    for (std::size_t i = 0; i < all_os.size(); ++i) {
        const double t0 =
            extract_max_transparency(c, a, switch_drive(all_os[i]), Mode::switching, true)
                .value;
        CHECK(std::fabs(t0 - want_t0[i]) <= 0.01);
        CHECK(t0 < prev);
        prev = t0;
    }
}

TEST_CASE("criterion 8: fit recovery") {
    const auto t0 = clock_type::now();
    const CavityParams c = headline_cavity();

    // noiseless EIT spectrum pins g_n and omega_c to 0.1%
    {
        DetuningGrid g;
        g.start = -2e6;
        g.stop = 2e6;
        g.points = 2001;
        FitProblem prob;
        prob.spectra.push_back(
            simulate_spectrum(c, eit_atoms(), eit_drive(4.1e6), g, Mode::eit));
        prob.free_params = {{"g_n", 1.0e7, 1.0e6, 1.0e8},
                            {"omega_c", 3.0e6, 1.0e5, 1.0e8}};
        const FitResult r = fit(prob);
        CHECK(r.converged);
        CHECK(std::fabs(r.values[0] - 13.5e6) / 13.5e6 <= 1e-3);
        CHECK(std::fabs(r.values[1] - 4.1e6) / 4.1e6 <= 1e-3);
    }

    // noisy spectra sharing the dephasing rate pin gamma0 to 5%
    {
        DetuningGrid g;
        g.start = -4e5;
        g.stop = 4e5;
        g.points = 4001;
        FitProblem prob;
        for (int i = 0; i < 11; ++i) {
            const double oc = 1.3e6 + (8.6e6 - 1.3e6) / 10.0 * i;
            Spectrum s = simulate_spectrum(c, eit_atoms(), eit_drive(oc), g, Mode::eit);
            prob.spectra.push_back(add_noise(s, 0.02, 20260817ull + i));
        }
        prob.free_params = {{"gamma0", 1200.0, 10.0, 1.0e4},
                            {"omega_c", 3.0e6, 1.0e5, 1.0e8}};
        const FitResult r = fit_global(prob);
        CHECK(r.converged);
        CHECK(std::fabs(r.values[0] - 600.0) / 600.0 <= 0.05);
    }

    // a bare-cavity scan recovers kappa to 0.5%
    {
        DetuningGrid g;
        g.start = -6e6;
        g.stop = 6e6;
        g.points = 801;
        FitProblem prob;
        prob.spectra.push_back(
            simulate_spectrum(c, AtomParams{}, DriveParams{}, g, Mode::bare));
        prob.free_params = {{"kappa", 3.0e6, 1.0e5, 1.0e8}};
        const FitResult r = fit(prob);
        CHECK(r.converged);
        CHECK(std::fabs(r.values[0] - 2.2e6) / 2.2e6 <= 5e-3);
    }

    CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("criterion 9: numerical hygiene") {
    const CavityParams c = headline_cavity();
    const AtomParams a = eit_atoms();

    // joint rescaling of all rates by a power of two is bitwise exact
    {
        const double s = 1024.0;
        CavityParams cs = c;
        cs.kappa *= s;
        cs.kappa_in *= s;
        AtomParams as = a;
        as.g_n *= s;
        as.gamma *= s;
        as.gamma0 *= s;
        for (int i = -5; i <= 5; ++i) {
            const double delta = 4e5 * i;
            const std::complex<double> x1 = chi_eit(a, 4.1e6, delta);
            const std::complex<double> x2 = chi_eit(as, 4.1e6 * s, delta * s);
            CHECK(x2.real() == s * x1.real());
            CHECK(x2.imag() == s * x1.imag());
            CHECK(reflectivity(c, x1, delta) == reflectivity(cs, x2, delta * s));
        }
        // a non-representable factor still agrees to 1e-12
        const double t = 7.0;
        CavityParams ct = c;
        ct.kappa *= t;
        ct.kappa_in *= t;
        AtomParams at = a;
        at.g_n *= t;
        at.gamma *= t;
        at.gamma0 *= t;
        for (int i = -5; i <= 5; ++i) {
            const double delta = 4e5 * i;
            const double r1 = reflectivity(c, chi_eit(a, 4.1e6, delta), delta);
            const double r2 =
                reflectivity(ct, chi_eit(at, 4.1e6 * t, delta * t), delta * t);
            CHECK(std::fabs(r1 - r2) <= 1e-12);
        }
    }

    // the EIT reflection spectrum is even in the detuning
    for (int i = 1; i <= 200; ++i) {
        const double delta = 2e6 * i / 200.0;
        const double rp = reflectivity(c, chi_eit(a, 4.1e6, delta), delta);
        const double rm = reflectivity(c, chi_eit(a, 4.1e6, -delta), -delta);
        CHECK(std::fabs(rp - rm) <= 1e-12);
    }

    // reflectivity and transparency stay inside [0, 1] in every mode
    {
        const AtomParams sw = switch_atoms();
        for (int i = 0; i <= 400; ++i) {
            const double delta = -40e6 + 80e6 * i / 400.0;
            const std::complex<double> chis[] = {
                std::complex<double>(0.0, 0.0),
                chi_two_level(a, delta),
                chi_eit(a, 4.1e6, delta),
                chi_switch(sw, switch_drive(42e6), delta),
            };
            for (const std::complex<double>& chi : chis) {
                const double r = reflectivity(c, chi, delta);
                const double t = transparency(c, chi, delta);
                CHECK(r >= 0.0);
                CHECK(r <= 1.0 + 1e-12);
                CHECK(t >= 0.0);
                CHECK(t <= 1.0 + 1e-12);
            }
        }
    }

    // CSV and JSON serialization round-trip bitwise
    {
        TempDir dir;
        DetuningGrid g;
        g.start = -2e6;
        g.stop = 2e6;
        g.points = 201;
        Spectrum s = simulate_spectrum(c, a, eit_drive(4.1e6), g, Mode::eit);
        s = add_noise(s, 0.015, 99);
        const std::string path = dir.file("round.csv");
        write_spectrum_csv(path, s);
        const Spectrum back = read_spectrum_csv(path);
        CHECK(back.delta == s.delta);
        CHECK(back.refl == s.refl);
        CHECK(back.sigma == s.sigma);
        CHECK(back.atoms.g_n == s.atoms.g_n);
        CHECK(back.cavity.kappa_in == s.cavity.kappa_in);

        FitResult fr;
        fr.names = {"g_n", "omega_c"};
        fr.values = {13.5e6, 0.1 + 0.2};
        fr.sigmas = {12.345678901234567, 0.0};
        fr.cost = 1e-30;
        fr.iterations = 7;
        fr.converged = true;
        fr.n_residuals = 201;
        fr.reduced_chi2 = 1.0000000000000002;
        fr.per_spectrum_cost = {1e-30};
        const FitResult fb = fit_result_from_json(fit_result_to_json(fr));
        CHECK(fb.names == fr.names);
        CHECK(fb.values == fr.values);
        CHECK(fb.sigmas == fr.sigmas);
        CHECK(fb.reduced_chi2 == fr.reduced_chi2);

        const FeatureReport rep = feature_report(c, a, eit_drive(4.1e6), Mode::eit, nullptr);
        const FeatureReport rb = feature_report_from_json(feature_report_to_json(rep));
        CHECK(rb.mode == rep.mode);
        REQUIRE(rb.max_transparency.has_value());
        CHECK(*rb.max_transparency == *rep.max_transparency);
        REQUIRE(rb.hwhm.has_value());
        CHECK(*rb.hwhm == *rep.hwhm);
    }
}
