#pragma once

#include <optional>
#include <string>

namespace ceit {

// All rates, detunings and Rabi frequencies are linear frequencies in Hz
// (angular quantities divided by 2*pi). Every formula in the model is
// homogeneous in these rates, so reflectivity and normalized transmission
// are invariant under a joint rescaling of all of them.

struct LossBudget {
    double t_high_ppm;     // input (high-transmission) mirror
    double t_low_ppm;      // back mirror
    double absorption_ppm; // round-trip scatter/absorption
};

struct CavityParams {
    double kappa;    // total field decay rate
    double kappa_in; // input-mirror contribution to kappa
    double tau = 1.0;// round-trip time, seconds; only enters intracavity_amplitude
    std::optional<LossBudget> budget; // optional mirror budget; must match kappa_in/kappa

    void validate() const;
};

struct AtomParams {
    double g_n;            // collective coupling rate
    double gamma;          // optical coherence decay
    double gamma0;         // ground-state coherence decay
    double gamma_s = 0.0;  // switching-transition coherence decay; required in switch mode

    void validate(bool need_gamma_s = false) const;
};

struct DriveParams {
    double omega_c = 0.0; // control Rabi frequency
    double omega_s = 0.0; // switching Rabi frequency
    double delta_s = 0.0; // switching field detuning, signed

    void validate() const;
};

enum class Mode { bare, two_level, eit, switching };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// cross-checks the parameter set against what the given mode actually uses
void validate(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
              const DriveParams& drive);

// T_H / (T_H + T_L + A); the kappa_in/kappa ratio implied by a mirror budget
double mirror_budget_to_kappa_ratio(double t_high_ppm, double t_low_ppm,
                                    double absorption_ppm);

// intracavity photon number of a field with Rabi frequency omega given the
// single-particle coupling rate on that transition: n = (omega / 2 g_single)^2
double photons_from_rabi(double omega, double g_single);

} // namespace ceit
