#include "ceit/model.hpp"

#include <cmath>

#include "ceit/errors.hpp"
#include "kernels/cxmath.hpp"

namespace ceit {

using detail::cd;
using detail::cdiv;
using detail::cmul;

std::complex<double> theta(const AtomParams& atoms, double omega_c, double delta) {
    atoms.validate();
    if (!(std::isfinite(omega_c) && omega_c >= 0.0))
        throw model_error("omega_c must be finite and >= 0");
    return detail::theta_of(atoms, omega_c, delta);
}

std::complex<double> theta_s(const AtomParams& atoms, const DriveParams& drive,
                             double delta) {
    atoms.validate();
    drive.validate();
    if (atoms.gamma_s == 0.0 && drive.delta_s == 0.0)
        throw model_error("theta_s needs gamma_s or delta_s nonzero");
    return detail::theta_s_of(atoms, drive, delta);
}

std::complex<double> chi_two_level(const AtomParams& atoms, double delta) {
    atoms.validate();
    return detail::two_level_prefactor(atoms, delta);
}

std::complex<double> chi_eit(const AtomParams& atoms, double omega_c, double delta) {
    atoms.validate();
    DriveParams drive;
    drive.omega_c = omega_c;
    drive.validate();
    return detail::chi_point(Mode::eit, atoms, drive, delta);
}

std::complex<double> chi_switch(const AtomParams& atoms, const DriveParams& drive,
                                double delta) {
    atoms.validate(true);
    drive.validate();
    return detail::chi_point(Mode::switching, atoms, drive, delta);
}

std::complex<double> chi_for_mode(Mode mode, const AtomParams& atoms,
                                  const DriveParams& drive, double delta) {
    if (mode != Mode::bare) {
        atoms.validate(mode == Mode::switching);
        drive.validate();
    }
    return detail::chi_point(mode, atoms, drive, delta);
}

std::complex<double> chi_local_eit(const AtomParams& atoms, double omega_c,
                                   double delta, double u) {
    atoms.validate();
    if (!(u > 0.0 && u <= 1.0))
        throw model_error("transverse weight u must lie in (0, 1]");
    const cd th = detail::theta_of(atoms, omega_c, delta);
    // i g^2 u / ((gamma - i delta)(1 + Theta u))
    return cdiv(cd{0.0, atoms.g_n * atoms.g_n * u},
                cmul(cd{atoms.gamma, -delta}, cd{1.0, 0.0} + th * u));
}

std::complex<double> chi_local_switch(const AtomParams& atoms, const DriveParams& drive,
                                      double delta, double u) {
    atoms.validate(true);
    drive.validate();
    if (!(u > 0.0 && u <= 1.0))
        throw model_error("transverse weight u must lie in (0, 1]");
    const cd th = detail::theta_of(atoms, drive.omega_c, delta);
    const cd ths = detail::theta_s_of(atoms, drive, delta);
    // i g^2 u (1 + Theta_s u) / ((gamma - i delta)(1 + (Theta + Theta_s) u))
    return cdiv(cmul(cd{0.0, atoms.g_n * atoms.g_n * u}, cd{1.0, 0.0} + ths * u),
                cmul(cd{atoms.gamma, -delta}, cd{1.0, 0.0} + (th + ths) * u));
}

double reflectivity(const CavityParams& cavity, std::complex<double> chi, double delta) {
    cavity.validate();
    return detail::reflectivity_point(cavity, chi, delta);
}

double transparency(const CavityParams& cavity, std::complex<double> chi, double delta) {
    cavity.validate();
    return detail::transparency_point(cavity, chi, delta);
}

std::complex<double> intracavity_amplitude(const CavityParams& cavity,
                                           std::complex<double> chi, double delta,
                                           std::complex<double> a_in) {
    cavity.validate();
    const double drive = std::sqrt(2.0 * cavity.kappa_in / cavity.tau);
    return cdiv(cmul(cd{drive, 0.0}, a_in),
                detail::response_denominator(cavity.kappa, chi, delta));
}

double cooperativity(const CavityParams& cavity, const AtomParams& atoms) {
    cavity.validate();
    atoms.validate();
    return atoms.g_n * atoms.g_n / (2.0 * cavity.kappa * atoms.gamma);
}

} // namespace ceit
