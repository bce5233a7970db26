#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ceit/spectra.hpp"

namespace ceit {

// Damped Gauss-Newton least squares on spectra. Positive rate parameters are
// optimized in log space (positivity without active sets); delta_s is linear.
// Free parameter names: g_n, omega_c, gamma0, kappa, gamma, omega_s, delta_s.
// omega_c is per-spectrum: with more than one spectrum it expands to
// omega_c[i]; every other name is shared. Fixed parameters come from each
// spectrum's snapshot.

struct FitParamSpec {
    std::string name;
    double init = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct FitOptions {
    int max_iterations = 200;
    double cost_tol = 1e-10; // relative cost decrease below this => converged
    double grad_tol = 1e-8;  // max-norm of the cost gradient below this => converged
};

struct FitProblem {
    std::vector<Spectrum> spectra;
    std::vector<FitParamSpec> free_params;
    FitOptions options;

    void validate() const;
};

struct FitResult {
    std::vector<std::string> names; // expanded (omega_c[i] per spectrum)
    std::vector<double> values;
    std::vector<double> sigmas;     // from (J^T J)^-1 scaled by reduced chi^2
    double cost = 0.0;              // sum of squared weighted residuals
    int iterations = 0;
    bool converged = false;
    std::size_t n_residuals = 0;
    double reduced_chi2 = 0.0;
    std::vector<double> per_spectrum_cost;
    std::vector<double> cost_trace; // accepted costs, non-increasing; not serialized
};

// expanded free-parameter names for a problem, in optimizer order
std::vector<std::string> expanded_names(const FitProblem& problem);

// concatenated (model - data)/sigma over all spectra; sigma <= 0 counts as 1.
// `values` are the expanded free-parameter values, linear units.
std::vector<double> residuals(const FitProblem& problem, const std::vector<double>& values);

// the optimizer's forward-difference Jacobian d r / d z at `values`, where z
// is the internal coordinate (log for rates, linear for delta_s); row-major
// n_residuals x n_params. Exposed so tests can cross-check it.
std::vector<double> fit_numeric_jacobian(const FitProblem& problem,
                                         const std::vector<double>& values);

FitResult fit(const FitProblem& problem);

// fit with the global-fit preconditions: at least two spectra and gamma0
// among the free parameters (it is always shared)
FitResult fit_global(const FitProblem& problem);

enum class FeatureKind { transparency, hwhm, shift };

struct SensitivityBand {
    std::vector<double> center, low, high; // one entry per spectrum
};

// feature envelope under a parameter scaled to (1-r, 1, 1+r) times its value
// in `values`; any remaining free parameters are re-fitted at each endpoint
SensitivityBand sensitivity_band(const FitProblem& problem,
                                 const std::vector<double>& values,
                                 const std::string& param, double relative_range,
                                 FeatureKind kind);

struct SelftestEntry {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// three fixed round-trip scenarios: two_level g_n (noiseless, 0.01%),
// eit g_n+omega_c (noiseless, 0.1%), global gamma0 over 11 spectra with
// noise sigma 0.02 (5%); spectrum i of the third uses seed + i
std::vector<SelftestEntry> fit_selftest(std::uint64_t seed);

} // namespace ceit
