#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "ceit/spectra.hpp"

namespace ceit {

struct TransparencyPeak {
    double value;
    double delta;
};

// Peak of the transverse-averaged transparency curve: coarse scan (4001
// points over a window set by the EIT width estimate omega_c^2 kappa / g_n^2,
// widened by the expected light shift in switch mode), then golden-section
// refinement to 1 Hz. With at_zero, evaluates at delta = 0 instead (the
// fixed-probe readout of the switching figures).
// Modes: eit, switch. Throws feature_error off-mode or when the transparency
// varies by less than 1e-12 over the scan.
TransparencyPeak extract_max_transparency(const CavityParams& cavity,
                                          const AtomParams& atoms,
                                          const DriveParams& drive, Mode mode,
                                          bool at_zero = false);

// HWHM of the EIT transparency feature: the positive delta where the curve
// falls to (peak + floor)/2, located by bisection to 1 Hz. The floor is the
// transparency at delta = 10 * omega_c^2 kappa / g_n^2 (outside the window,
// inside the absorption band). Requires peak >= 10 * floor.
double extract_hwhm(const CavityParams& cavity, const AtomParams& atoms,
                    const DriveParams& drive);

// Light-induced displacement of the EIT resonance in switch mode: argmax of
// the on-axis (u = 1) transparency minus the same argmax at omega_s = 0,
// each refined to 1 Hz. The on-axis response is used because transverse
// averaging smears the light shift across [0, shift] and the averaged argmax
// is not linear in omega_s^2; the axial slice tracks the two-photon
// resonance directly.
double extract_resonance_shift(const CavityParams& cavity, const AtomParams& atoms,
                               const DriveParams& drive);

// Vacuum Rabi dip positions of a two_level spectrum: the two deepest local
// minima of the response denominator |kappa - i delta - i chi|^2 sampled on
// the spectrum's own grid (from its parameter snapshot), refined by a
// three-point parabola. Returned sorted ascending.
std::pair<double, double> extract_rabi_dips(const Spectrum& s);

struct FeatureReport {
    Mode mode = Mode::bare;
    std::optional<double> max_transparency;
    std::optional<double> peak_delta;
    std::optional<double> transparency_at_zero;
    std::optional<double> hwhm;
    std::optional<double> resonance_shift;
    std::optional<std::pair<double, double>> rabi_dips;
    std::map<std::string, std::string> method;
};

// features appropriate to the mode: eit -> peak + hwhm; switch -> peak,
// value at delta = 0, resonance shift; two_level -> rabi dips (needs a grid)
FeatureReport feature_report(const CavityParams& cavity, const AtomParams& atoms,
                             const DriveParams& drive, Mode mode,
                             const DetuningGrid* grid = nullptr);

// same, with parameters and grid taken from a spectrum's snapshot
FeatureReport feature_report(const Spectrum& s);

} // namespace ceit
