#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ceit/features.hpp"
#include "ceit/fitting.hpp"
#include "ceit/oracle.hpp"
#include "ceit/spectra.hpp"

namespace ceit {

// Canonical unit for every frequency in files and APIs is linear Hz. The
// mhz setting is an input convenience: values read from a config (rates,
// detunings, Rabi frequencies, grid limits, fit bounds, sweep values,
// omega_p) are multiplied by 1e6 at the parse boundary. Dimensionless and
// non-frequency fields (tau, ppm budgets, noise sigma, seeds, point counts,
// quadrature tolerances) are never scaled.
enum class Units { hz, mhz };

Units units_from_string(const std::string& s);

struct NoiseConfig {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

struct SweepConfig {
    std::string variable; // dotted field path, e.g. "drive.omega_c"
    std::vector<double> values;
    std::string feature;  // max_transparency | transparency_at_zero | hwhm | resonance_shift
};

// Parsed run configuration. Which blocks must be present depends on the
// command; parse_config only enforces internal consistency of what is there.
struct RunConfig {
    Mode mode = Mode::bare;
    CavityParams cavity{};
    AtomParams atoms{};
    DriveParams drive{};
    bool has_cavity = false;
    bool has_atoms = false;
    std::optional<DetuningGrid> grid;
    std::optional<NoiseConfig> noise;
    std::vector<FitParamSpec> fit_free;
    FitOptions fit_options;
    std::optional<SweepConfig> sweep;
    oracle::QuadratureConfig quad;
    double omega_p = 0.0; // 0 = pick automatically where needed
};

// Strict parse: unknown keys anywhere are a config_error naming the path.
RunConfig parse_config(const nlohmann::json& j, Units units);

// Reads, parses and applies `key.path=value` overrides before parse_config.
// Override values are parsed as JSON when possible, else taken as strings,
// and are interpreted in the same units as the rest of the config.
RunConfig load_config(const std::string& path, Units units,
                      const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& j, const std::string& assignment);

// Spectrum CSV. Header carries the parameter snapshot:
//   # mode=<mode> kappa=<Hz> ... delta_s=<Hz>
//   delta_hz,reflectivity,sigma
// Numbers are written with %.17g, so reading back reproduces every double
// bit-for-bit. tau and the loss budget are not part of the format; reads
// get tau = 1 and no budget.
void write_spectrum_csv(const std::string& path, const Spectrum& s);
Spectrum read_spectrum_csv(const std::string& path);

nlohmann::json fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json feature_report_to_json(const FeatureReport& r);
FeatureReport feature_report_from_json(const nlohmann::json& j);

void write_oracle_csv(const std::string& path, const oracle::OracleReport& report);

// rows from the file; the aggregate max/mean deviations are recomputed from
// the rows in file order, matching how the report built them
oracle::OracleReport read_oracle_csv(const std::string& path);

void write_sweep_csv(const std::string& path, const std::string& variable,
                     const std::string& feature, const std::vector<double>& values,
                     const std::vector<double>& results);

struct SweepTable {
    std::string variable;
    std::string feature;
    std::vector<double> values;
    std::vector<double> results;
};

SweepTable read_sweep_csv(const std::string& path);

// Writes to a temporary file in the target directory, then renames onto
// `path`; on any failure the temporary is removed and io_error is thrown,
// so a partial file never lands at the destination.
void write_text_atomic(const std::string& path, const std::string& text);

} // namespace ceit
