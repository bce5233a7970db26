#pragma once

#include <cstdint>
#include <vector>

#include "ceit/params.hpp"

namespace ceit {

struct DetuningGrid {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    void validate() const;          // stop > start, points >= 2
    std::vector<double> deltas() const; // uniform, endpoints exact
};

// A sampled probe spectrum plus the parameter snapshot that produced (or is
// believed to describe) it. Stored as parallel arrays; deltas strictly
// increasing. noise metadata is in-memory only and not serialized.
struct Spectrum {
    Mode mode = Mode::bare;
    CavityParams cavity;
    AtomParams atoms;
    DriveParams drive;
    std::vector<double> delta;
    std::vector<double> refl;
    std::vector<double> sigma;   // per-sample uncertainty, 0 = none recorded

    std::uint64_t noise_seed = 0;
    double noise_sigma = 0.0;
    int clamp_count = 0;

    std::size_t size() const { return delta.size(); }
    void validate() const;
};

// one reflectivity sample per grid point, via the active kernel backend
Spectrum simulate_spectrum(const CavityParams& cavity, const AtomParams& atoms,
                           const DriveParams& drive, const DetuningGrid& grid, Mode mode);

// independent zero-mean Gaussian perturbations of the reflectivity, clamped
// to [0,1] (clamp events counted); deterministic in seed; records sigma per
// sample. Sampler: trigonometric Box-Muller on std::mt19937_64, two uniform
// draws per pair, so the stream is identical across platforms.
Spectrum add_noise(const Spectrum& s, double sigma, std::uint64_t seed);

// integrated |R(delta) - R(-delta)| over the spectrum's grid, both sides
// re-evaluated from the parameter snapshot: exactly zero for even responses
double asymmetry_metric(const Spectrum& s);

} // namespace ceit
