#include "ceit/spectra.hpp"

#include <cmath>
#include <random>

#include "ceit/errors.hpp"
#include "ceit/kernels.hpp"

namespace ceit {

void DetuningGrid::validate() const {
    if (!(std::isfinite(start) && std::isfinite(stop) && stop > start))
        throw model_error("grid requires finite stop > start");
    if (points < 2)
        throw model_error("grid requires at least 2 points");
}

std::vector<double> DetuningGrid::deltas() const {
    validate();
    std::vector<double> d(static_cast<std::size_t>(points));
    const double step = (stop - start) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i)
        d[static_cast<std::size_t>(i)] = start + step * static_cast<double>(i);
    d.back() = stop;
    return d;
}

void Spectrum::validate() const {
    if (delta.size() != refl.size() || delta.size() != sigma.size())
        throw model_error("spectrum arrays must have equal length");
    if (delta.empty())
        throw model_error("spectrum must contain at least one sample");
    for (std::size_t i = 1; i < delta.size(); ++i)
        if (!(delta[i] > delta[i - 1]))
            throw model_error("spectrum deltas must be strictly increasing");
    for (const double s : sigma)
        if (!(s >= 0.0))
            throw model_error("spectrum sigmas must be >= 0");
}

Spectrum simulate_spectrum(const CavityParams& cavity, const AtomParams& atoms,
                           const DriveParams& drive, const DetuningGrid& grid, Mode mode) {
    ceit::validate(mode, cavity, atoms, drive);
    Spectrum s;
    s.mode = mode;
    s.cavity = cavity;
    s.atoms = atoms;
    s.drive = drive;
    s.delta = grid.deltas();
    s.refl.resize(s.delta.size());
    s.sigma.assign(s.delta.size(), 0.0);
    kernels::eval_spectrum(mode, cavity, atoms, drive, s.delta.data(), s.delta.size(),
                           s.refl.data(), nullptr);
    return s;
}

Spectrum add_noise(const Spectrum& s, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw model_error("noise sigma must be finite and >= 0");
    Spectrum out = s;
    out.noise_seed = seed;
    out.noise_sigma = sigma;
    out.clamp_count = 0;
    if (sigma == 0.0)
        return out;

    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() {
        // (0, 1]: top 53 bits, shifted into the open-below interval
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    };
    double spare = 0.0;
    bool have_spare = false;
    const auto gauss = [&]() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    };

    for (std::size_t i = 0; i < out.refl.size(); ++i) {
        double v = out.refl[i] + sigma * gauss();
        if (v < 0.0) {
            v = 0.0;
            ++out.clamp_count;
        } else if (v > 1.0) {
            v = 1.0;
            ++out.clamp_count;
        }
        out.refl[i] = v;
        out.sigma[i] = sigma;
    }
    return out;
}

double asymmetry_metric(const Spectrum& s) {
    s.validate();
    // reflectivity at the mirrored detunings, recomputed from the snapshot
    std::vector<double> neg(s.delta.size());
    for (std::size_t i = 0; i < s.delta.size(); ++i)
        neg[i] = -s.delta[i];
    std::vector<double> rneg(neg.size());
    kernels::eval_spectrum(s.mode, s.cavity, s.atoms, s.drive, neg.data(), neg.size(),
                           rneg.data(), nullptr);
    std::vector<double> rpos(s.delta.size());
    kernels::eval_spectrum(s.mode, s.cavity, s.atoms, s.drive, s.delta.data(),
                           s.delta.size(), rpos.data(), nullptr);

    double acc = 0.0;
    for (std::size_t i = 1; i < s.delta.size(); ++i) {
        const double f0 = std::fabs(rpos[i - 1] - rneg[i - 1]);
        const double f1 = std::fabs(rpos[i] - rneg[i]);
        acc += 0.5 * (f0 + f1) * (s.delta[i] - s.delta[i - 1]);
    }
    return acc;
}

} // namespace ceit
