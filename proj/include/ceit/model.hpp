#pragma once

#include <complex>

#include "ceit/params.hpp"

namespace ceit {

// Single-point model evaluation. Batch (grid) evaluation with the same
// numerics lives in ceit/kernels.hpp; the scalar kernel and these functions
// share one code path, so single-point and batch scalar results are
// bit-identical.

// Theta = (omega_c^2/2) / ((gamma - i*delta)(gamma0 - i*delta))
std::complex<double> theta(const AtomParams& atoms, double omega_c, double delta);

// Theta_s = omega_s^2 / ((gamma_s - i*delta_s)(gamma0 - i*delta))
std::complex<double> theta_s(const AtomParams& atoms, const DriveParams& drive,
                             double delta);

// chi = i g_n^2 / (gamma - i*delta)
std::complex<double> chi_two_level(const AtomParams& atoms, double delta);

// chi = i g_n^2/(gamma - i*delta) * ln(1+Theta)/Theta
// (series 1 - Theta/2 + Theta^2/3 - ... below |Theta| = 1e-4)
std::complex<double> chi_eit(const AtomParams& atoms, double omega_c, double delta);

// chi = i g_n^2/(gamma - i*delta) * [Theta ln(1+Theta+Theta_s)/(Theta+Theta_s)^2
//                                    + Theta_s/(Theta+Theta_s)]
// Reduces bit-exactly to chi_eit at omega_s = 0.
std::complex<double> chi_switch(const AtomParams& atoms, const DriveParams& drive,
                                double delta);

// chi for the given mode (bare -> 0)
std::complex<double> chi_for_mode(Mode mode, const AtomParams& atoms,
                                  const DriveParams& drive, double delta);

// local (unaveraged) response of the slice with transverse weight u in (0,1];
// the transverse average of chi_local(u)/u over u reproduces chi_eit/chi_switch
std::complex<double> chi_local_eit(const AtomParams& atoms, double omega_c,
                                   double delta, double u);
std::complex<double> chi_local_switch(const AtomParams& atoms, const DriveParams& drive,
                                      double delta, double u);

// R = |2 kappa_in / (kappa - i*delta - i*chi) - 1|^2
double reflectivity(const CavityParams& cavity, std::complex<double> chi, double delta);

// T/T0 = kappa^2 / ((kappa + Im chi)^2 + (delta + Re chi)^2)
double transparency(const CavityParams& cavity, std::complex<double> chi, double delta);

// <a> = sqrt(2 kappa_in / tau) a_in / (kappa - i*delta - i*chi)
std::complex<double> intracavity_amplitude(const CavityParams& cavity,
                                           std::complex<double> chi, double delta,
                                           std::complex<double> a_in);

// C = g_n^2 / (2 kappa gamma)
double cooperativity(const CavityParams& cavity, const AtomParams& atoms);

} // namespace ceit
