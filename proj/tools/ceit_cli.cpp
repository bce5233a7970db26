#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ceit/errors.hpp"
#include "ceit/features.hpp"
#include "ceit/fitting.hpp"
#include "ceit/io.hpp"
#include "ceit/plot.hpp"

using namespace ceit;

namespace {

// exit codes: 0 ok, 2 config/io/usage, 3 model domain, 4 feature extraction,
// 5 fit did not converge (or selftest failure), 6 oracle mismatch
int classify(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const feature_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const fit_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const quadrature_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const singular_system_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const model_error& e) { // branch_cut_error lands here, names its delta
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_atomic(out, text);
}

std::string basename_of(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

struct Opts {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    Units units = Units::hz;
    std::vector<std::string> sets;
};

RunConfig need_config(const Opts& o, const char* cmd) {
    if (o.config.empty())
        throw config_error(std::string(cmd) + " needs --config");
    return load_config(o.config, o.units, o.sets);
}

int cmd_simulate(const Opts& o) {
    const RunConfig cfg = need_config(o, "simulate");
    if (o.out.empty())
        throw config_error("simulate needs --out");
    if (!cfg.has_cavity)
        throw config_error("simulate needs a cavity block");
    if (cfg.mode != Mode::bare && !cfg.has_atoms)
        throw config_error("simulate needs an atoms block in mode " + to_string(cfg.mode));
    if (!cfg.grid)
        throw config_error("simulate needs a grid block");
    Spectrum s = simulate_spectrum(cfg.cavity, cfg.atoms, cfg.drive, *cfg.grid, cfg.mode);
    if (cfg.noise) {
        const std::uint64_t sd = o.seed_given ? o.seed : cfg.noise->seed;
        s = add_noise(s, cfg.noise->sigma, sd);
    }
    write_spectrum_csv(o.out, s);
    std::printf("wrote %s (%zu samples)\n", o.out.c_str(), s.size());
    return 0;
}

int cmd_features(const Opts& o, const std::string& spectrum_file) {
    FeatureReport rep;
    if (!spectrum_file.empty()) {
        rep = feature_report(read_spectrum_csv(spectrum_file));
    } else {
        const RunConfig cfg = need_config(o, "features");
        if (!cfg.has_cavity || !cfg.has_atoms)
            throw config_error("features needs cavity and atoms blocks");
        const DetuningGrid* grid = cfg.grid ? &*cfg.grid : nullptr;
        rep = feature_report(cfg.cavity, cfg.atoms, cfg.drive, cfg.mode, grid);
    }
    emit(o.out, feature_report_to_json(rep).dump(2) + "\n");
    return 0;
}

int cmd_fit(const Opts& o, const std::vector<std::string>& files, bool global) {
    const char* name = global ? "fit-global" : "fit";
    const RunConfig cfg = need_config(o, name);
    if (cfg.fit_free.empty())
        throw config_error(std::string(name) + " needs fit.free parameters in the config");
    if (files.empty())
        throw config_error(std::string(name) + " needs at least one data file");

    FitProblem prob;
    for (const std::string& f : files)
        prob.spectra.push_back(read_spectrum_csv(f));
    prob.free_params = cfg.fit_free;
    prob.options = cfg.fit_options;

    try { // problem-shape violations are usage errors, not model failures
        prob.validate();
        if (global) {
            if (prob.spectra.size() < 2)
                throw model_error("global fit needs at least two spectra");
            bool has_gamma0 = false;
            for (const FitParamSpec& p : prob.free_params)
                has_gamma0 = has_gamma0 || p.name == "gamma0";
            if (!has_gamma0)
                throw model_error("global fit needs gamma0 among the free parameters");
        }
    } catch (const model_error& e) {
        throw config_error(e.what());
    }

    const FitResult r = global ? fit_global(prob) : fit(prob);
    emit(o.out, fit_result_to_json(r).dump(2) + "\n");
    if (!r.converged)
        std::fprintf(stderr, "fit did not converge after %d iterations\n", r.iterations);
    return r.converged ? 0 : 5;
}

int cmd_oracle_check(const Opts& o, bool corrupt) {
    const RunConfig cfg = need_config(o, "oracle-check");
    if (!cfg.has_atoms)
        throw config_error("oracle-check needs an atoms block");
    if (!cfg.grid)
        throw config_error("oracle-check needs a grid block");

    oracle::OracleReport rep = oracle::oracle_report(cfg.mode, cfg.atoms, cfg.drive,
                                                     cfg.grid->deltas(), cfg.quad,
                                                     cfg.omega_p);
    if (corrupt) { // negative control: skew the closed form, keep the oracles
        rep.max_rel_quad = rep.mean_rel_quad = 0.0;
        rep.max_rel_bloch = rep.mean_rel_bloch = 0.0;
        for (oracle::OracleRow& row : rep.rows) {
            row.closed *= 1.0 + 1e-4;
            const double den = std::max(std::abs(row.closed), 1e-300);
            row.rel_quad = std::abs(row.quad - row.closed) / den;
            row.rel_bloch = std::abs(row.bloch - row.closed) / den;
            rep.max_rel_quad = std::max(rep.max_rel_quad, row.rel_quad);
            rep.max_rel_bloch = std::max(rep.max_rel_bloch, row.rel_bloch);
            rep.mean_rel_quad += row.rel_quad;
            rep.mean_rel_bloch += row.rel_bloch;
        }
        rep.mean_rel_quad /= static_cast<double>(rep.rows.size());
        rep.mean_rel_bloch /= static_cast<double>(rep.rows.size());
    }
    if (!o.out.empty())
        write_oracle_csv(o.out, rep);

    const bool ok = rep.max_rel_quad <= 1e-6 && rep.max_rel_bloch <= 1e-6;
    std::printf("oracle-check: %zu points, max_rel_quad=%.3g, max_rel_bloch=%.3g -> %s\n",
                rep.rows.size(), rep.max_rel_quad, rep.max_rel_bloch,
                ok ? "OK" : "MISMATCH");
    return ok ? 0 : 6;
}

void apply_sweep_value(const std::string& var, double v, CavityParams& cav,
                       AtomParams& at, DriveParams& dr) {
    if (var == "cavity.kappa")
        cav.kappa = v;
    else if (var == "cavity.kappa_in")
        cav.kappa_in = v;
    else if (var == "atoms.g_n")
        at.g_n = v;
    else if (var == "atoms.gamma")
        at.gamma = v;
    else if (var == "atoms.gamma0")
        at.gamma0 = v;
    else if (var == "atoms.gamma_s")
        at.gamma_s = v;
    else if (var == "drive.omega_c")
        dr.omega_c = v;
    else if (var == "drive.omega_s")
        dr.omega_s = v;
    else if (var == "drive.delta_s")
        dr.delta_s = v;
    else
        throw config_error("sweep variable '" + var + "' is not a sweepable field");
}

int cmd_sweep(const Opts& o) {
    const RunConfig cfg = need_config(o, "sweep");
    if (o.out.empty())
        throw config_error("sweep needs --out");
    if (!cfg.sweep)
        throw config_error("sweep needs a sweep block");
    if (!cfg.has_cavity || !cfg.has_atoms)
        throw config_error("sweep needs cavity and atoms blocks");

    std::vector<double> results;
    for (double v : cfg.sweep->values) {
        CavityParams cav = cfg.cavity;
        AtomParams at = cfg.atoms;
        DriveParams dr = cfg.drive;
        apply_sweep_value(cfg.sweep->variable, v, cav, at, dr);
        if (cfg.sweep->feature == "max_transparency")
            results.push_back(extract_max_transparency(cav, at, dr, cfg.mode).value);
        else if (cfg.sweep->feature == "transparency_at_zero")
            results.push_back(
                extract_max_transparency(cav, at, dr, cfg.mode, true).value);
        else if (cfg.sweep->feature == "hwhm")
            results.push_back(extract_hwhm(cav, at, dr));
        else
            results.push_back(extract_resonance_shift(cav, at, dr));
    }
    write_sweep_csv(o.out, cfg.sweep->variable, cfg.sweep->feature, cfg.sweep->values,
                    results);
    std::printf("wrote %s (%zu rows)\n", o.out.c_str(), results.size());
    return 0;
}

int cmd_plot(const Opts& o, const std::vector<std::string>& files) {
    if (files.empty())
        throw config_error("plot needs at least one input file");
    if (o.out.empty())
        throw config_error("plot needs --out");

    std::vector<PlotSeries> series;
    std::string xlab = "delta (MHz)";
    std::string ylab = "reflectivity";
    for (const std::string& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in)
            throw io_error("cannot open '" + f + "'");
        std::string first;
        std::getline(in, first);
        in.close();

        PlotSeries s;
        s.label = basename_of(f);
        if (first.rfind("# mode=", 0) == 0) {
            const Spectrum sp = read_spectrum_csv(f);
            for (std::size_t i = 0; i < sp.size(); ++i) {
                s.x.push_back(sp.delta[i] / 1e6);
                s.y.push_back(sp.refl[i]);
            }
        } else {
            const SweepTable t = read_sweep_csv(f);
            for (std::size_t i = 0; i < t.values.size(); ++i) {
                s.x.push_back(t.values[i] / 1e6);
                s.y.push_back(t.results[i]);
            }
            xlab = t.variable + " (MHz)";
            ylab = t.feature;
        }
        series.push_back(std::move(s));
    }

    const std::string svg = render_svg(series, xlab, ylab);
    const std::string dat = render_dat(series);
    std::string dat_path = o.out;
    if (dat_path.size() > 4 && dat_path.compare(dat_path.size() - 4, 4, ".svg") == 0)
        dat_path.replace(dat_path.size() - 4, 4, ".dat");
    else
        dat_path += ".dat";
    write_text_atomic(o.out, svg);
    write_text_atomic(dat_path, dat);
    std::printf("wrote %s and %s\n", o.out.c_str(), dat_path.c_str());
    return 0;
}

int cmd_selftest(const Opts& o) {
    const std::vector<SelftestEntry> entries = fit_selftest(o.seed);
    bool all = true;
    for (const SelftestEntry& e : entries) {
        std::printf("%-18s %s value=%.10g expected=%.10g rel_err=%.2e tol=%.0e\n",
                    e.name.c_str(), e.pass ? "PASS" : "FAIL", e.value, e.expected,
                    e.rel_err, e.tol);
        all = all && e.pass;
    }
    return all ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity EIT / all-optical switching spectrum tool"};
    app.require_subcommand(1);

    Opts o;
    std::string units_str = "hz";
    app.add_option("--config", o.config, "JSON run configuration");
    app.add_option("--out", o.out, "output file (JSON commands default to stdout)");
    CLI::Option* seed_opt =
        app.add_option("--seed", o.seed, "seed for anything random (default 0)");
    app.add_option("--units", units_str, "config input units")
        ->check(CLI::IsMember({"hz", "mhz"}));
    app.add_option("--set", o.sets,
                   "override a config key, e.g. --set drive.omega_s=7e7 (repeatable)");

    CLI::App* sim = app.add_subcommand("simulate", "synthesize a spectrum CSV");
    CLI::App* feat = app.add_subcommand("features", "extract spectral features as JSON");
    std::string feat_file;
    feat->add_option("spectrum", feat_file, "spectrum CSV (otherwise uses --config)");
    CLI::App* fitc = app.add_subcommand("fit", "least-squares fit to spectrum files");
    std::vector<std::string> fit_files;
    fitc->add_option("data", fit_files, "spectrum CSV files");
    CLI::App* fitg =
        app.add_subcommand("fit-global", "joint fit with shared gamma0 across files");
    std::vector<std::string> fitg_files;
    fitg->add_option("data", fitg_files, "spectrum CSV files");
    CLI::App* oc = app.add_subcommand(
        "oracle-check", "closed form vs quadrature and Bloch steady state");
    bool corrupt = false;
    oc->add_flag("--corrupt-closed-form", corrupt)->group("");
    CLI::App* swp = app.add_subcommand("sweep", "evaluate a feature over a value sweep");
    CLI::App* plt =
        app.add_subcommand("plot", "render spectrum or sweep CSVs to SVG + dat");
    std::vector<std::string> plot_files;
    plt->add_option("inputs", plot_files, "spectrum or sweep CSV files");
    CLI::App* st = app.add_subcommand("selftest", "fixed fit round-trip scenarios");

    for (CLI::App* sub : {sim, feat, fitc, fitg, oc, swp, plt, st})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    o.seed_given = seed_opt->count() > 0;
    o.units = units_from_string(units_str);

    if (sim->parsed())
        return classify([&] { return cmd_simulate(o); });
    if (feat->parsed())
        return classify([&] { return cmd_features(o, feat_file); });
    if (fitc->parsed())
        return classify([&] { return cmd_fit(o, fit_files, false); });
    if (fitg->parsed())
        return classify([&] { return cmd_fit(o, fitg_files, true); });
    if (oc->parsed())
        return classify([&] { return cmd_oracle_check(o, corrupt); });
    if (swp->parsed())
        return classify([&] { return cmd_sweep(o); });
    if (plt->parsed())
        return classify([&] { return cmd_plot(o, plot_files); });
    if (st->parsed())
        return classify([&] { return cmd_selftest(o); });
    return 2;
}
