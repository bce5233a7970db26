#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "ceit/params.hpp"

namespace ceit::oracle {

// Independent re-derivation of the closed-form susceptibilities: steady-state
// Bloch linear response at fixed transverse weight u, then adaptive quadrature
// over the Gaussian mode profile. Everything here is deliberately built from
// different primitives than the model core so the two can check each other.

struct QuadratureConfig {
    double abs_tol = -1.0;     // < 0 means auto (chi wrappers use 1e-12 * g_n^2/gamma)
    double rel_tol = 1e-8;
    int max_subdivisions = 200;
};

struct QuadResult {
    std::complex<double> value;
    double error;    // estimated, sum of per-interval Gauss-Kronrod deltas
    int intervals;
};

// adaptive Gauss-Kronrod 7-15 of local_fn(u)/u over (0,1]; the /u weight is
// the Jacobian of u = exp(-2 r^2/w^2) applied to the radial integral, and it
// cancels the coupling's own factor of u so the integrand is regular at 0
QuadResult transverse_average(const std::function<std::complex<double>(double)>& local_fn,
                              const QuadratureConfig& cfg = {});

enum class BlochScheme { lambda3, lambda4 };

struct BlochResult {
    std::complex<double> coherence; // probe-transition coherence, proportional to omega_p
    std::complex<double> chi;       // g_n^2 * coherence / probe amplitude
};

// First-order steady state of the optical Bloch equations at full intensity
// (u = 1). Couplings: b_c = omega_c/sqrt(2), b_s = omega_s, b_p = omega_p/2;
// the first two are fixed by requiring the solve to reproduce Theta and
// Theta_s exactly, the last cancels out of chi.
// Preconditions: 0 < omega_p <= 1e-3 * gamma (linear response).
// Throws singular_system_error when the linear system's L1 condition
// estimate exceeds 1e14.
BlochResult bloch_steady_state(BlochScheme scheme, const AtomParams& atoms,
                               const DriveParams& drive, double omega_p, double delta);

// same solve with every field amplitude scaled by sqrt(u) and the coupling
// by u; equals the closed-form local responses for all u in (0,1]
std::complex<double> bloch_chi_local(BlochScheme scheme, const AtomParams& atoms,
                                     const DriveParams& drive, double omega_p,
                                     double delta, double u);

// transverse quadrature of the closed-form local response (eit or switching)
std::complex<double> chi_quad(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                              double delta, const QuadratureConfig& cfg = {});

// transverse quadrature of the Bloch steady-state local response
std::complex<double> chi_bloch_quad(Mode mode, const AtomParams& atoms,
                                    const DriveParams& drive, double omega_p, double delta,
                                    const QuadratureConfig& cfg = {});

struct OracleRow {
    double delta;
    std::complex<double> closed, quad, bloch;
    double rel_quad, rel_bloch;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    double max_rel_quad = 0.0, mean_rel_quad = 0.0;
    double max_rel_bloch = 0.0, mean_rel_bloch = 0.0;
};

// closed form vs both oracles over a detuning grid; omega_p <= 0 selects
// 1e-4 * gamma
OracleReport oracle_report(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                           const std::vector<double>& deltas,
                           const QuadratureConfig& cfg = {}, double omega_p = 0.0);

} // namespace ceit::oracle
