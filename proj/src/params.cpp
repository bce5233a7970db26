#include "ceit/params.hpp"

#include <cmath>

#include "ceit/errors.hpp"

namespace ceit {

namespace {

void require(bool ok, const char* msg) {
    if (!ok)
        throw model_error(msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void CavityParams::validate() const {
    require(finite(kappa) && kappa > 0.0, "kappa must be finite and > 0");
    require(finite(kappa_in) && kappa_in > 0.0, "kappa_in must be finite and > 0");
    require(kappa_in <= kappa, "kappa_in must not exceed kappa");
    require(finite(tau) && tau > 0.0, "tau must be finite and > 0");
    if (budget) {
        const double r = mirror_budget_to_kappa_ratio(budget->t_high_ppm,
                                                      budget->t_low_ppm,
                                                      budget->absorption_ppm);
        require(std::fabs(kappa_in / kappa - r) <= 1e-12 * r,
                "loss budget inconsistent with kappa_in/kappa");
    }
}

void AtomParams::validate(bool need_gamma_s) const {
    require(finite(g_n) && g_n >= 0.0, "g_n must be finite and >= 0");
    require(finite(gamma) && gamma > 0.0, "gamma must be finite and > 0");
    require(finite(gamma0) && gamma0 > 0.0, "gamma0 must be finite and > 0");
    require(finite(gamma_s) && gamma_s >= 0.0, "gamma_s must be finite and >= 0");
    if (need_gamma_s)
        require(gamma_s > 0.0, "gamma_s must be > 0 in switch mode");
}

void DriveParams::validate() const {
    require(finite(omega_c) && omega_c >= 0.0, "omega_c must be finite and >= 0");
    require(finite(omega_s) && omega_s >= 0.0, "omega_s must be finite and >= 0");
    require(finite(delta_s), "delta_s must be finite");
}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::bare:      return "bare";
    case Mode::two_level: return "two_level";
    case Mode::eit:       return "eit";
    case Mode::switching: return "switch";
    }
    throw model_error("unknown mode");
}

Mode mode_from_string(const std::string& s) {
    if (s == "bare")      return Mode::bare;
    if (s == "two_level") return Mode::two_level;
    if (s == "eit")       return Mode::eit;
    if (s == "switch")    return Mode::switching;
    throw model_error("unknown mode '" + s + "' (expected bare|two_level|eit|switch)");
}

void validate(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
              const DriveParams& drive) {
    cavity.validate();
    if (mode == Mode::bare)
        return;
    atoms.validate(mode == Mode::switching);
    drive.validate();
}

double mirror_budget_to_kappa_ratio(double t_high_ppm, double t_low_ppm,
                                    double absorption_ppm) {
    if (!(std::isfinite(t_high_ppm) && t_high_ppm >= 0.0))
        throw model_error("t_high_ppm must be finite and >= 0");
    if (!(std::isfinite(t_low_ppm) && t_low_ppm >= 0.0))
        throw model_error("t_low_ppm must be finite and >= 0");
    if (!(std::isfinite(absorption_ppm) && absorption_ppm >= 0.0))
        throw model_error("absorption_ppm must be finite and >= 0");
    const double total = t_high_ppm + t_low_ppm + absorption_ppm;
    if (!(total > 0.0))
        throw model_error("mirror loss budget must have positive total loss");
    return t_high_ppm / total;
}

double photons_from_rabi(double omega, double g_single) {
    if (!(std::isfinite(omega) && omega >= 0.0))
        throw model_error("omega must be finite and >= 0");
    if (!(std::isfinite(g_single) && g_single > 0.0))
        throw model_error("g_single must be finite and > 0");
    const double half = omega / (2.0 * g_single);
    return half * half;
}

} // namespace ceit
