#pragma once

#include <cmath>
#include <complex>

#include "ceit/errors.hpp"
#include "ceit/params.hpp"

// Scalar complex core shared by the single-point API and the scalar batch
// kernel. Plain formulas only: no C99 Annex G NaN fixups, no Smith scaling
// in the division. Rate magnitudes live in [1e-6, 1e12] Hz, so every
// intermediate |z|^2 stays far inside the double range and the naive forms
// are safe; this keeps the scalar path structurally identical to the AVX2
// one.

namespace ceit::detail {

using cd = std::complex<double>;

// |S| threshold below which ln(1+S)/S switches to its series
inline constexpr double kSeriesThresholdSq = 1e-8; // (1e-4)^2
// closed-negative-real-axis tolerance for the principal-log branch cut
inline constexpr double kBranchTol = 1e-12;

inline cd cmul(cd a, cd b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

inline cd cdiv(cd a, cd b) {
    const double n = b.real() * b.real() + b.imag() * b.imag();
    return {(a.real() * b.real() + a.imag() * b.imag()) / n,
            (a.imag() * b.real() - a.real() * b.imag()) / n};
}

inline double sqabs(cd a) { return a.real() * a.real() + a.imag() * a.imag(); }

inline bool on_branch_cut(cd w) {
    return w.real() <= kBranchTol && std::fabs(w.imag()) <= kBranchTol;
}

// principal branch, same decomposition the vector kernel uses
inline cd clog(cd w) {
    return {0.5 * std::log(sqabs(w)), std::atan2(w.imag(), w.real())};
}

// bracket of the switching susceptibility,
//   B(Theta, Theta_s) = Theta ln(1+S)/S^2 + Theta_s/S,   S = Theta + Theta_s,
// evaluated as ((Theta/S) ln(1+S) + Theta_s)/S so that Theta_s = 0 gives
// Theta/S = 1 + 0i exactly and B degenerates bit-for-bit into the EIT shape
// ln(1+Theta)/Theta. chi_eit calls this with Theta_s = 0.
//
// Below |S| = 1e-4 the log is replaced by the series
//   B = 1 - Theta (1/2 - S/3 + S^2/4 - S^3/5 + S^4/6),
// truncation |Theta S^5|/7 = |Theta/S| |S|^6/7. Since Re Theta and
// Re Theta_s share the sign of Re[1/(gamma - i delta)] etc., |Theta/S| is
// bounded by sqrt(1 + delta^2/gamma^2), so the truncation stays below 1e-16
// for any detuning short of 1e8*gamma.
inline cd switch_shape(cd th, cd ths, double delta) {
    const cd S = th + ths;
    if (sqabs(S) < kSeriesThresholdSq) {
        cd p{1.0 / 6.0, 0.0};
        p = cmul(p, S) + cd{-1.0 / 5.0, 0.0};
        p = cmul(p, S) + cd{1.0 / 4.0, 0.0};
        p = cmul(p, S) + cd{-1.0 / 3.0, 0.0};
        p = cmul(p, S) + cd{1.0 / 2.0, 0.0};
        return cd{1.0, 0.0} - cmul(th, p);
    }
    const cd w = cd{1.0, 0.0} + S;
    if (on_branch_cut(w))
        throw branch_cut_error(delta);
    return cdiv(cmul(cdiv(th, S), clog(w)) + ths, S);
}

// i g^2 / (gamma - i delta)
inline cd two_level_prefactor(const AtomParams& atoms, double delta) {
    return cdiv(cd{0.0, atoms.g_n * atoms.g_n}, cd{atoms.gamma, -delta});
}

inline cd theta_of(const AtomParams& atoms, double omega_c, double delta) {
    const cd D{atoms.gamma, -delta};
    const cd G{atoms.gamma0, -delta};
    return cdiv(cd{0.5 * omega_c * omega_c, 0.0}, cmul(D, G));
}

inline cd theta_s_of(const AtomParams& atoms, const DriveParams& drive, double delta) {
    const cd Gs{atoms.gamma_s, -drive.delta_s};
    const cd G{atoms.gamma0, -delta};
    return cdiv(cd{drive.omega_s * drive.omega_s, 0.0}, cmul(Gs, G));
}

inline cd chi_point(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                    double delta) {
    switch (mode) {
    case Mode::bare:
        return {0.0, 0.0};
    case Mode::two_level:
        return two_level_prefactor(atoms, delta);
    case Mode::eit:
        return cmul(two_level_prefactor(atoms, delta),
                    switch_shape(theta_of(atoms, drive.omega_c, delta), cd{0.0, 0.0},
                                 delta));
    case Mode::switching:
        return cmul(two_level_prefactor(atoms, delta),
                    switch_shape(theta_of(atoms, drive.omega_c, delta),
                                 theta_s_of(atoms, drive, delta), delta));
    }
    throw model_error("unknown mode");
}

// kappa - i delta - i chi  =  (kappa + Im chi) - i (delta + Re chi)
inline cd response_denominator(double kappa, cd chi, double delta) {
    return {kappa + chi.imag(), -(delta + chi.real())};
}

inline double reflectivity_point(const CavityParams& cavity, cd chi, double delta) {
    const cd w = cdiv(cd{2.0 * cavity.kappa_in, 0.0},
                      response_denominator(cavity.kappa, chi, delta));
    const double re = w.real() - 1.0;
    return re * re + w.imag() * w.imag();
}

inline double transparency_point(const CavityParams& cavity, cd chi, double delta) {
    return cavity.kappa * cavity.kappa /
           sqabs(response_denominator(cavity.kappa, chi, delta));
}

} // namespace ceit::detail
