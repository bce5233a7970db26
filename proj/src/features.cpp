#include "ceit/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ceit/errors.hpp"
#include "ceit/model.hpp"

namespace ceit {

namespace {

constexpr double kRefineTol = 1.0; // Hz
constexpr int kScanPoints = 4001;

double golden_max(const std::function<double(double)>& f, double a, double b) {
    constexpr double phi = 0.6180339887498948482;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > kRefineTol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

struct ScanMax {
    double arg;
    double value;
};

// coarse scan over [-w, w] then golden-section around the best cell
ScanMax refine_max(const std::function<double(double)>& f, double w) {
    std::vector<double> xs(kScanPoints), ys(kScanPoints);
    const double step = 2.0 * w / (kScanPoints - 1);
    std::size_t best = 0;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < kScanPoints; ++i) {
        const double x = -w + step * i;
        const double y = f(x);
        xs[static_cast<std::size_t>(i)] = x;
        ys[static_cast<std::size_t>(i)] = y;
        if (y > ys[best])
            best = static_cast<std::size_t>(i);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 1e-12)
        throw feature_error("transparency varies by less than 1e-12 over the scan window");
    const double a = best == 0 ? xs.front() : xs[best - 1];
    const double b = best + 1 == xs.size() ? xs.back() : xs[best + 1];
    const double arg = golden_max(f, a, b);
    return {arg, f(arg)};
}

// EIT window width estimate, also the floor anchor for the hwhm definition
double window_estimate(const CavityParams& cavity, const AtomParams& atoms,
                       const DriveParams& drive) {
    const double w =
        10.0 * drive.omega_c * drive.omega_c * cavity.kappa / (atoms.g_n * atoms.g_n);
    if (!(std::isfinite(w) && w > 0.0))
        return 10.0 * cavity.kappa;
    return w;
}

double light_shift_estimate(const AtomParams& atoms, const DriveParams& drive) {
    const double d2 = atoms.gamma_s * atoms.gamma_s + drive.delta_s * drive.delta_s;
    if (d2 == 0.0)
        return 0.0;
    return drive.omega_s * drive.omega_s * std::fabs(drive.delta_s) / d2;
}

double averaged_transparency(const CavityParams& cavity, const AtomParams& atoms,
                             const DriveParams& drive, Mode mode, double delta) {
    return transparency(cavity, chi_for_mode(mode, atoms, drive, delta), delta);
}

double axial_transparency(const CavityParams& cavity, const AtomParams& atoms,
                          const DriveParams& drive, double delta) {
    return transparency(cavity, chi_local_switch(atoms, drive, delta, 1.0), delta);
}

} // namespace

TransparencyPeak extract_max_transparency(const CavityParams& cavity,
                                          const AtomParams& atoms,
                                          const DriveParams& drive, Mode mode,
                                          bool at_zero) {
    if (mode != Mode::eit && mode != Mode::switching)
        throw feature_error("max transparency is defined for eit and switch modes");
    validate(mode, cavity, atoms, drive);
    if (at_zero)
        return {averaged_transparency(cavity, atoms, drive, mode, 0.0), 0.0};
    double w = window_estimate(cavity, atoms, drive);
    if (mode == Mode::switching)
        w += 4.0 * light_shift_estimate(atoms, drive);
    const auto f = [&](double d) {
        return averaged_transparency(cavity, atoms, drive, mode, d);
    };
    const ScanMax m = refine_max(f, w);
    return {m.value, m.arg};
}

double extract_hwhm(const CavityParams& cavity, const AtomParams& atoms,
                    const DriveParams& drive) {
    validate(Mode::eit, cavity, atoms, drive);
    const TransparencyPeak peak =
        extract_max_transparency(cavity, atoms, drive, Mode::eit);
    const double floor_delta = window_estimate(cavity, atoms, drive);
    const auto f = [&](double d) {
        return averaged_transparency(cavity, atoms, drive, Mode::eit, d);
    };
    const double floor_value = f(floor_delta);
    if (!(peak.value >= 10.0 * floor_value))
        throw feature_error("EIT peak does not exceed the absorption floor by 10x");
    const double target = 0.5 * (peak.value + floor_value);
    double lo = peak.delta;
    double hi = floor_delta;
    if (f(hi) > target)
        throw feature_error("no half-maximum crossing inside the search band");
    while (hi - lo > kRefineTol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > target ? lo : hi) = mid;
    }
    return std::fabs(0.5 * (lo + hi));
}

double extract_resonance_shift(const CavityParams& cavity, const AtomParams& atoms,
                               const DriveParams& drive) {
    validate(Mode::switching, cavity, atoms, drive);
    const double w =
        window_estimate(cavity, atoms, drive) + 4.0 * light_shift_estimate(atoms, drive);

    const auto argmax_axial = [&](const DriveParams& d) {
        const auto f = [&](double delta) {
            return axial_transparency(cavity, atoms, d, delta);
        };
        return refine_max(f, w).arg;
    };
    DriveParams off = drive;
    off.omega_s = 0.0;
    return argmax_axial(drive) - argmax_axial(off);
}

std::pair<double, double> extract_rabi_dips(const Spectrum& s) {
    if (s.mode != Mode::two_level)
        throw feature_error("rabi dips are defined for two_level spectra");
    s.validate();
    if (s.size() < 3)
        throw feature_error("rabi dip extraction needs at least 3 samples");

    // normal-mode resonances: minima of |kappa - i delta - i chi|^2. The raw
    // reflectivity minima sit well inside them (by ~17% at the headline
    // parameters) because the interference term in R moves with kappa_in;
    // the denominator minima are what the splitting formula describes.
    const std::size_t n = s.size();
    std::vector<double> den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> chi = chi_two_level(s.atoms, s.delta[i]);
        const double re = s.cavity.kappa + chi.imag();
        const double im = s.delta[i] + chi.real();
        den[i] = re * re + im * im;
    }

    struct Dip {
        std::size_t idx;
        double val;
    };
    std::vector<Dip> dips;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (den[i] < den[i - 1] && den[i] < den[i + 1])
            dips.push_back({i, den[i]});
    if (dips.size() < 2)
        throw feature_error("fewer than two local minima in the spectrum");
    std::sort(dips.begin(), dips.end(),
              [](const Dip& a, const Dip& b) { return a.val < b.val; });

    const auto refine = [&](std::size_t i) {
        const double x0 = s.delta[i - 1], x1 = s.delta[i], x2 = s.delta[i + 1];
        const double y0 = den[i - 1], y1 = den[i], y2 = den[i + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double curv = (d12 - d01) / (x2 - x0);
        if (curv <= 0.0)
            return x1;
        return 0.5 * (x0 + x1 - d01 / curv);
    };
    double a = refine(dips[0].idx);
    double b = refine(dips[1].idx);
    if (a > b)
        std::swap(a, b);
    return {a, b};
}

FeatureReport feature_report(const CavityParams& cavity, const AtomParams& atoms,
                             const DriveParams& drive, Mode mode,
                             const DetuningGrid* grid) {
    FeatureReport rep;
    rep.mode = mode;
    if (mode == Mode::eit) {
        const TransparencyPeak p = extract_max_transparency(cavity, atoms, drive, mode);
        rep.max_transparency = p.value;
        rep.peak_delta = p.delta;
        rep.hwhm = extract_hwhm(cavity, atoms, drive);
        rep.method["max_transparency"] =
            "golden-section argmax of transverse-averaged transparency, 1 Hz tolerance";
        rep.method["hwhm"] =
            "transparency (peak+floor)/2 crossing, floor at 10*omega_c^2*kappa/g_n^2, "
            "bisection to 1 Hz";
    } else if (mode == Mode::switching) {
        const TransparencyPeak p = extract_max_transparency(cavity, atoms, drive, mode);
        rep.max_transparency = p.value;
        rep.peak_delta = p.delta;
        rep.transparency_at_zero =
            extract_max_transparency(cavity, atoms, drive, mode, true).value;
        rep.resonance_shift = extract_resonance_shift(cavity, atoms, drive);
        rep.method["max_transparency"] =
            "golden-section argmax of transverse-averaged transparency, 1 Hz tolerance";
        rep.method["resonance_shift"] =
            "on-axis (u=1) transparency argmax minus its omega_s=0 counterpart; the "
            "transverse average smears the light shift, the axial slice tracks it";
    } else if (mode == Mode::two_level) {
        if (grid == nullptr)
            throw feature_error("two_level feature extraction needs a detuning grid");
        const Spectrum s = simulate_spectrum(cavity, atoms, drive, *grid, mode);
        rep.rabi_dips = extract_rabi_dips(s);
        rep.method["rabi_dips"] =
            "normal-mode minima of |kappa - i delta - i chi|^2 on the sample grid, "
            "three-point parabolic refinement";
    } else {
        throw feature_error("no features defined for bare mode");
    }
    return rep;
}

FeatureReport feature_report(const Spectrum& s) {
    if (s.mode == Mode::two_level) {
        FeatureReport rep;
        rep.mode = s.mode;
        rep.rabi_dips = extract_rabi_dips(s);
        rep.method["rabi_dips"] =
            "normal-mode minima of |kappa - i delta - i chi|^2 on the sample grid, "
            "three-point parabolic refinement";
        return rep;
    }
    return feature_report(s.cavity, s.atoms, s.drive, s.mode, nullptr);
}

} // namespace ceit
