#include "ceit/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "ceit/errors.hpp"

namespace ceit {

namespace {

using nlohmann::json;

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw config_error(path + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k)
                known = true;
        if (!known)
            throw config_error("unknown key '" + path + "." + it.key() + "'");
    }
}

double get_num(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw config_error("missing key '" + path + "." + key + "'");
    if (!j[key].is_number())
        throw config_error("'" + path + "." + key + "' must be a number");
    return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& path, const char* key,
                  double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number())
        throw config_error("'" + path + "." + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw config_error("missing key '" + path + "." + key + "'");
    if (!j[key].is_number_integer())
        throw config_error("'" + path + "." + key + "' must be an integer");
    return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw config_error("missing key '" + path + "." + key + "'");
    if (!j[key].is_string())
        throw config_error("'" + path + "." + key + "' must be a string");
    return j[key].get<std::string>();
}

const std::set<std::string> kSweepVars = {
    "cavity.kappa", "cavity.kappa_in", "atoms.g_n",    "atoms.gamma",
    "atoms.gamma0", "atoms.gamma_s",   "drive.omega_c", "drive.omega_s",
    "drive.delta_s"};

const std::set<std::string> kSweepFeatures = {"max_transparency",
                                              "transparency_at_zero", "hwhm",
                                              "resonance_shift"};

} // namespace

Units units_from_string(const std::string& s) {
    if (s == "hz")
        return Units::hz;
    if (s == "mhz")
        return Units::mhz;
    throw config_error("unknown units '" + s + "' (expected hz|mhz)");
}

RunConfig parse_config(const nlohmann::json& j, Units units) {
    const double f = units == Units::mhz ? 1e6 : 1.0;
    check_keys(j, "config",
               {"mode", "cavity", "atoms", "drive", "grid", "noise", "fit", "sweep",
                "quadrature", "omega_p"});

    RunConfig cfg;
    try {
        cfg.mode = mode_from_string(get_str(j, "config", "mode"));
    } catch (const model_error& e) {
        throw config_error(std::string("config.mode: ") + e.what());
    }

    if (j.contains("cavity")) {
        const json& c = j["cavity"];
        check_keys(c, "cavity", {"kappa", "kappa_in", "tau", "loss_budget"});
        cfg.cavity.kappa = f * get_num(c, "cavity", "kappa");
        cfg.cavity.tau = get_num_or(c, "cavity", "tau", 1.0);
        if (c.contains("loss_budget")) {
            const json& b = c["loss_budget"];
            check_keys(b, "cavity.loss_budget",
                       {"t_high_ppm", "t_low_ppm", "absorption_ppm"});
            LossBudget budget;
            budget.t_high_ppm = get_num(b, "cavity.loss_budget", "t_high_ppm");
            budget.t_low_ppm = get_num(b, "cavity.loss_budget", "t_low_ppm");
            budget.absorption_ppm = get_num(b, "cavity.loss_budget", "absorption_ppm");
            cfg.cavity.budget = budget;
        }
        if (c.contains("kappa_in")) {
            cfg.cavity.kappa_in = f * get_num(c, "cavity", "kappa_in");
        } else if (cfg.cavity.budget) {
            try {
                cfg.cavity.kappa_in =
                    cfg.cavity.kappa *
                    mirror_budget_to_kappa_ratio(cfg.cavity.budget->t_high_ppm,
                                                 cfg.cavity.budget->t_low_ppm,
                                                 cfg.cavity.budget->absorption_ppm);
            } catch (const model_error& e) {
                throw config_error(std::string("cavity.loss_budget: ") + e.what());
            }
        } else {
            throw config_error("cavity needs kappa_in or loss_budget");
        }
        cfg.has_cavity = true;
    }

    if (j.contains("atoms")) {
        const json& a = j["atoms"];
        check_keys(a, "atoms", {"g_n", "gamma", "gamma0", "gamma_s"});
        cfg.atoms.g_n = f * get_num(a, "atoms", "g_n");
        cfg.atoms.gamma = f * get_num(a, "atoms", "gamma");
        cfg.atoms.gamma0 = f * get_num(a, "atoms", "gamma0");
        cfg.atoms.gamma_s = f * get_num_or(a, "atoms", "gamma_s", 0.0);
        cfg.has_atoms = true;
    }

    if (j.contains("drive")) {
        const json& d = j["drive"];
        check_keys(d, "drive", {"omega_c", "omega_s", "delta_s"});
        cfg.drive.omega_c = f * get_num_or(d, "drive", "omega_c", 0.0);
        cfg.drive.omega_s = f * get_num_or(d, "drive", "omega_s", 0.0);
        cfg.drive.delta_s = f * get_num_or(d, "drive", "delta_s", 0.0);
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid", {"start", "stop", "points"});
        DetuningGrid grid;
        grid.start = f * get_num(g, "grid", "start");
        grid.stop = f * get_num(g, "grid", "stop");
        grid.points = get_int(g, "grid", "points");
        try {
            grid.validate();
        } catch (const model_error& e) {
            throw config_error(std::string("grid: ") + e.what());
        }
        cfg.grid = grid;
    }

    if (j.contains("noise")) {
        const json& n = j["noise"];
        check_keys(n, "noise", {"sigma", "seed"});
        NoiseConfig noise;
        noise.sigma = get_num(n, "noise", "sigma");
        if (!(noise.sigma >= 0.0))
            throw config_error("noise.sigma must be >= 0");
        if (n.contains("seed")) {
            const json& sd = n["seed"];
            const bool ok = sd.is_number_unsigned() ||
                            (sd.is_number_integer() && sd.get<long long>() >= 0);
            if (!ok)
                throw config_error("'noise.seed' must be a non-negative integer");
            noise.seed = sd.get<std::uint64_t>();
        }
        cfg.noise = noise;
    }

    if (j.contains("fit")) {
        const json& fj = j["fit"];
        check_keys(fj, "fit", {"free", "max_iterations"});
        if (!fj.contains("free") || !fj["free"].is_array() || fj["free"].empty())
            throw config_error("fit.free must be a non-empty array");
        std::size_t idx = 0;
        for (const json& p : fj["free"]) {
            const std::string path = "fit.free[" + std::to_string(idx++) + "]";
            check_keys(p, path, {"name", "init", "lo", "hi"});
            FitParamSpec spec;
            spec.name = get_str(p, path, "name");
            spec.init = f * get_num(p, path, "init");
            spec.lo = f * get_num(p, path, "lo");
            spec.hi = f * get_num(p, path, "hi");
            cfg.fit_free.push_back(spec);
        }
        if (fj.contains("max_iterations")) {
            cfg.fit_options.max_iterations = get_int(fj, "fit", "max_iterations");
            if (cfg.fit_options.max_iterations < 1)
                throw config_error("fit.max_iterations must be >= 1");
        }
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        check_keys(s, "sweep", {"variable", "feature", "values", "start", "stop", "points"});
        SweepConfig sweep;
        sweep.variable = get_str(s, "sweep", "variable");
        if (!kSweepVars.count(sweep.variable))
            throw config_error("sweep.variable '" + sweep.variable +
                               "' is not a sweepable field");
        sweep.feature = get_str(s, "sweep", "feature");
        if (!kSweepFeatures.count(sweep.feature))
            throw config_error("sweep.feature '" + sweep.feature +
                               "' is not a known feature");
        const bool has_values = s.contains("values");
        const bool has_range =
            s.contains("start") || s.contains("stop") || s.contains("points");
        if (has_values == has_range)
            throw config_error("sweep needs either values or start/stop/points");
        if (has_values) {
            if (!s["values"].is_array() || s["values"].empty())
                throw config_error("sweep.values must be a non-empty array");
            std::size_t idx = 0;
            for (const json& v : s["values"]) {
                if (!v.is_number())
                    throw config_error("sweep.values[" + std::to_string(idx) +
                                       "] must be a number");
                sweep.values.push_back(f * v.get<double>());
                ++idx;
            }
        } else {
            const double start = f * get_num(s, "sweep", "start");
            const double stop = f * get_num(s, "sweep", "stop");
            const int points = get_int(s, "sweep", "points");
            if (points < 2)
                throw config_error("sweep.points must be >= 2");
            for (int i = 0; i < points; ++i)
                sweep.values.push_back(start +
                                       (stop - start) * i / double(points - 1));
            sweep.values.back() = stop;
        }
        cfg.sweep = sweep;
    }

    if (j.contains("quadrature")) {
        const json& q = j["quadrature"];
        check_keys(q, "quadrature", {"abs_tol", "rel_tol", "max_subdivisions"});
        cfg.quad.abs_tol = get_num_or(q, "quadrature", "abs_tol", cfg.quad.abs_tol);
        cfg.quad.rel_tol = get_num_or(q, "quadrature", "rel_tol", cfg.quad.rel_tol);
        if (q.contains("max_subdivisions"))
            cfg.quad.max_subdivisions = get_int(q, "quadrature", "max_subdivisions");
        if (!(cfg.quad.rel_tol > 0.0))
            throw config_error("quadrature.rel_tol must be > 0");
        if (cfg.quad.max_subdivisions < 8)
            throw config_error("quadrature.max_subdivisions must be >= 8");
    }

    if (j.contains("omega_p")) {
        if (!j["omega_p"].is_number())
            throw config_error("'config.omega_p' must be a number");
        cfg.omega_p = f * j["omega_p"].get<double>();
        if (!(cfg.omega_p >= 0.0))
            throw config_error("omega_p must be >= 0");
    }

    // validate whatever parameter blocks were given, as far as the mode uses them
    try {
        if (cfg.has_cavity)
            cfg.cavity.validate();
        if (cfg.has_atoms)
            cfg.atoms.validate(cfg.mode == Mode::switching);
        cfg.drive.validate();
    } catch (const model_error& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("override '" + assignment + "' is not of the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    std::vector<std::string> keys;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key =
            dot == std::string::npos ? path.substr(pos) : path.substr(pos, dot - pos);
        if (key.empty())
            throw config_error("override '" + assignment + "' has an empty key segment");
        keys.push_back(key);
        if (dot == std::string::npos)
            break;
        pos = dot + 1;
    }

    nlohmann::json* node = &j;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        if (!node->is_object())
            throw config_error("override '" + assignment +
                               "' walks through a non-object value");
        node = &(*node)[keys[i]];
        if (node->is_null())
            *node = nlohmann::json::object();
    }
    if (!node->is_object())
        throw config_error("override '" + assignment + "' walks through a non-object value");

    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded())
        parsed = value; // keep as a string
    (*node)[keys.back()] = std::move(parsed);
}

RunConfig load_config(const std::string& path, Units units,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config '" + path + "': " + e.what());
    }
    for (const std::string& o : overrides)
        apply_override(j, o);
    return parse_config(j, units);
}

void write_spectrum_csv(const std::string& path, const Spectrum& s) {
    s.validate();
    std::string out;
    out += "# mode=" + to_string(s.mode);
    out += " kappa=" + g17(s.cavity.kappa);
    out += " kappa_in=" + g17(s.cavity.kappa_in);
    out += " g_n=" + g17(s.atoms.g_n);
    out += " gamma=" + g17(s.atoms.gamma);
    out += " gamma0=" + g17(s.atoms.gamma0);
    out += " gamma_s=" + g17(s.atoms.gamma_s);
    out += " omega_c=" + g17(s.drive.omega_c);
    out += " omega_s=" + g17(s.drive.omega_s);
    out += " delta_s=" + g17(s.drive.delta_s);
    out += "\n";
    out += "delta_hz,reflectivity,sigma\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += g17(s.delta[i]) + "," + g17(s.refl[i]) + "," + g17(s.sigma[i]) + "\n";
    write_text_atomic(path, out);
}

namespace {

double parse_double(const std::string& tok, const std::string& path, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
        throw io_error(path + ":" + std::to_string(line) + ": bad number '" + tok + "'");
    return v;
}

} // namespace

Spectrum read_spectrum_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open spectrum file '" + path + "'");

    Spectrum s{};
    s.cavity.tau = 1.0;
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line))
        throw io_error(path + ":1: empty file");
    if (line.rfind("# ", 0) != 0)
        throw io_error(path + ":1: expected a '# mode=...' header line");

    std::istringstream hs(line.substr(2));
    std::string tok;
    std::set<std::string> seen;
    while (hs >> tok) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            throw io_error(path + ":1: bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (!seen.insert(key).second)
            throw io_error(path + ":1: duplicate header key '" + key + "'");
        if (key == "mode") {
            try {
                s.mode = mode_from_string(val);
            } catch (const model_error& e) {
                throw io_error(path + ":1: " + std::string(e.what()));
            }
        } else if (key == "kappa") {
            s.cavity.kappa = parse_double(val, path, 1);
        } else if (key == "kappa_in") {
            s.cavity.kappa_in = parse_double(val, path, 1);
        } else if (key == "g_n") {
            s.atoms.g_n = parse_double(val, path, 1);
        } else if (key == "gamma") {
            s.atoms.gamma = parse_double(val, path, 1);
        } else if (key == "gamma0") {
            s.atoms.gamma0 = parse_double(val, path, 1);
        } else if (key == "gamma_s") {
            s.atoms.gamma_s = parse_double(val, path, 1);
        } else if (key == "omega_c") {
            s.drive.omega_c = parse_double(val, path, 1);
        } else if (key == "omega_s") {
            s.drive.omega_s = parse_double(val, path, 1);
        } else if (key == "delta_s") {
            s.drive.delta_s = parse_double(val, path, 1);
        } else {
            throw io_error(path + ":1: unknown header key '" + key + "'");
        }
    }
    for (const char* key : {"mode", "kappa", "kappa_in", "g_n", "gamma", "gamma0",
                            "gamma_s", "omega_c", "omega_s", "delta_s"})
        if (!seen.count(key))
            throw io_error(path + ":1: header is missing '" + std::string(key) + "'");

    ++lineno;
    if (!std::getline(in, line) || line != "delta_hz,reflectivity,sigma")
        throw io_error(path + ":2: expected column line 'delta_hz,reflectivity,sigma'");

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            throw io_error(path + ":" + std::to_string(lineno) +
                           ": expected three comma-separated columns");
        s.delta.push_back(parse_double(line.substr(0, c1), path, lineno));
        s.refl.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1), path, lineno));
        s.sigma.push_back(parse_double(line.substr(c2 + 1), path, lineno));
    }
    try {
        s.validate();
    } catch (const model_error& e) {
        throw io_error(path + ": " + std::string(e.what()));
    }
    return s;
}

nlohmann::json fit_result_to_json(const FitResult& r) {
    json params = json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        params.push_back({{"name", r.names[i]},
                          {"value", r.values[i]},
                          {"sigma", r.sigmas[i]}});
    return json{{"parameters", params},
                {"cost", r.cost},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"n_residuals", r.n_residuals},
                {"reduced_chi2", r.reduced_chi2},
                {"per_spectrum_cost", r.per_spectrum_cost}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
    check_keys(j, "fit_result",
               {"parameters", "cost", "iterations", "converged", "n_residuals",
                "reduced_chi2", "per_spectrum_cost"});
    FitResult r;
    if (!j.contains("parameters") || !j["parameters"].is_array())
        throw config_error("fit_result.parameters must be an array");
    for (const json& p : j["parameters"]) {
        check_keys(p, "fit_result.parameters[]", {"name", "value", "sigma"});
        r.names.push_back(get_str(p, "fit_result.parameters[]", "name"));
        r.values.push_back(get_num(p, "fit_result.parameters[]", "value"));
        r.sigmas.push_back(get_num(p, "fit_result.parameters[]", "sigma"));
    }
    r.cost = get_num(j, "fit_result", "cost");
    r.iterations = get_int(j, "fit_result", "iterations");
    if (!j.contains("converged") || !j["converged"].is_boolean())
        throw config_error("fit_result.converged must be a boolean");
    r.converged = j["converged"].get<bool>();
    r.n_residuals = static_cast<std::size_t>(get_num(j, "fit_result", "n_residuals"));
    r.reduced_chi2 = get_num(j, "fit_result", "reduced_chi2");
    if (j.contains("per_spectrum_cost")) {
        if (!j["per_spectrum_cost"].is_array())
            throw config_error("fit_result.per_spectrum_cost must be an array");
        for (const json& c : j["per_spectrum_cost"]) {
            if (!c.is_number())
                throw config_error("fit_result.per_spectrum_cost entries must be numbers");
            r.per_spectrum_cost.push_back(c.get<double>());
        }
    }
    return r;
}

nlohmann::json feature_report_to_json(const FeatureReport& r) {
    json j{{"mode", to_string(r.mode)}};
    if (r.max_transparency)
        j["max_transparency"] = *r.max_transparency;
    if (r.peak_delta)
        j["peak_delta_hz"] = *r.peak_delta;
    if (r.transparency_at_zero)
        j["transparency_at_zero"] = *r.transparency_at_zero;
    if (r.hwhm)
        j["hwhm_hz"] = *r.hwhm;
    if (r.resonance_shift)
        j["resonance_shift_hz"] = *r.resonance_shift;
    if (r.rabi_dips)
        j["rabi_dips_hz"] = {r.rabi_dips->first, r.rabi_dips->second};
    if (!r.method.empty())
        j["method"] = r.method;
    return j;
}

FeatureReport feature_report_from_json(const nlohmann::json& j) {
    check_keys(j, "feature_report",
               {"mode", "max_transparency", "peak_delta_hz", "transparency_at_zero",
                "hwhm_hz", "resonance_shift_hz", "rabi_dips_hz", "method"});
    FeatureReport r;
    try {
        r.mode = mode_from_string(get_str(j, "feature_report", "mode"));
    } catch (const model_error& e) {
        throw config_error(std::string("feature_report.mode: ") + e.what());
    }
    if (j.contains("max_transparency"))
        r.max_transparency = get_num(j, "feature_report", "max_transparency");
    if (j.contains("peak_delta_hz"))
        r.peak_delta = get_num(j, "feature_report", "peak_delta_hz");
    if (j.contains("transparency_at_zero"))
        r.transparency_at_zero = get_num(j, "feature_report", "transparency_at_zero");
    if (j.contains("hwhm_hz"))
        r.hwhm = get_num(j, "feature_report", "hwhm_hz");
    if (j.contains("resonance_shift_hz"))
        r.resonance_shift = get_num(j, "feature_report", "resonance_shift_hz");
    if (j.contains("rabi_dips_hz")) {
        const json& d = j["rabi_dips_hz"];
        if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
            throw config_error("feature_report.rabi_dips_hz must be a 2-number array");
        r.rabi_dips = std::make_pair(d[0].get<double>(), d[1].get<double>());
    }
    if (j.contains("method")) {
        if (!j["method"].is_object())
            throw config_error("feature_report.method must be an object");
        for (auto it = j["method"].begin(); it != j["method"].end(); ++it) {
            if (!it.value().is_string())
                throw config_error("feature_report.method values must be strings");
            r.method[it.key()] = it.value().get<std::string>();
        }
    }
    return r;
}

void write_oracle_csv(const std::string& path, const oracle::OracleReport& report) {
    std::string out;
    out += "# transverse-averaged susceptibility cross-check\n";
    out += "# Bloch drive conventions: b_c = omega_c/sqrt(2), b_s = omega_s, "
           "b_p = omega_p/2\n";
    out += "delta_hz,re_closed,im_closed,re_quad,im_quad,re_bloch,im_bloch,"
           "rel_err_quad,rel_err_bloch\n";
    for (const oracle::OracleRow& r : report.rows) {
        out += g17(r.delta) + "," + g17(r.closed.real()) + "," + g17(r.closed.imag()) +
               "," + g17(r.quad.real()) + "," + g17(r.quad.imag()) + "," +
               g17(r.bloch.real()) + "," + g17(r.bloch.imag()) + "," +
               g17(r.rel_quad) + "," + g17(r.rel_bloch) + "\n";
    }
    write_text_atomic(path, out);
}

oracle::OracleReport read_oracle_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open oracle report '" + path + "'");
    oracle::OracleReport rep;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            if (line != "delta_hz,re_closed,im_closed,re_quad,im_quad,re_bloch,"
                        "im_bloch,rel_err_quad,rel_err_bloch")
                throw io_error(path + ":" + std::to_string(lineno) +
                               ": unexpected oracle column line");
            header_seen = true;
            continue;
        }
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            const std::size_t c = line.find(',', pos);
            cols.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
            if (c == std::string::npos)
                break;
            pos = c + 1;
        }
        if (cols.size() != 9)
            throw io_error(path + ":" + std::to_string(lineno) +
                           ": expected nine comma-separated columns");
        double v[9];
        for (int i = 0; i < 9; ++i)
            v[i] = parse_double(cols[static_cast<std::size_t>(i)], path, lineno);
        oracle::OracleRow row;
        row.delta = v[0];
        row.closed = {v[1], v[2]};
        row.quad = {v[3], v[4]};
        row.bloch = {v[5], v[6]};
        row.rel_quad = v[7];
        row.rel_bloch = v[8];
        rep.max_rel_quad = std::max(rep.max_rel_quad, row.rel_quad);
        rep.max_rel_bloch = std::max(rep.max_rel_bloch, row.rel_bloch);
        rep.mean_rel_quad += row.rel_quad;
        rep.mean_rel_bloch += row.rel_bloch;
        rep.rows.push_back(row);
    }
    if (!header_seen || rep.rows.empty())
        throw io_error(path + ": no oracle rows found");
    rep.mean_rel_quad /= static_cast<double>(rep.rows.size());
    rep.mean_rel_bloch /= static_cast<double>(rep.rows.size());
    return rep;
}

void write_sweep_csv(const std::string& path, const std::string& variable,
                     const std::string& feature, const std::vector<double>& values,
                     const std::vector<double>& results) {
    if (values.size() != results.size())
        throw io_error("sweep values/results length mismatch");
    std::string out = variable + "," + feature + "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out += g17(values[i]) + "," + g17(results[i]) + "\n";
    write_text_atomic(path, out);
}

SweepTable read_sweep_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open sweep file '" + path + "'");
    SweepTable t;
    std::string line;
    if (!std::getline(in, line))
        throw io_error(path + ":1: empty file");
    const std::size_t c0 = line.find(',');
    if (c0 == std::string::npos || line.find(',', c0 + 1) != std::string::npos)
        throw io_error(path + ":1: expected a two-column header");
    t.variable = line.substr(0, c0);
    t.feature = line.substr(c0 + 1);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::size_t c = line.find(',');
        if (c == std::string::npos || line.find(',', c + 1) != std::string::npos)
            throw io_error(path + ":" + std::to_string(lineno) +
                           ": expected two comma-separated columns");
        t.values.push_back(parse_double(line.substr(0, c), path, lineno));
        t.results.push_back(parse_double(line.substr(c + 1), path, lineno));
    }
    if (t.values.empty())
        throw io_error(path + ": no sweep rows found");
    return t;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::size_t slash = path.find_last_of('/');
    const std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
    std::string tmpl = dir + "/.tmpXXXXXX";
    std::vector<char> tmp(tmpl.begin(), tmpl.end());
    tmp.push_back('\0');

    const int fd = ::mkstemp(tmp.data());
    if (fd < 0)
        throw io_error("cannot create temporary file in '" + dir +
                       "': " + std::strerror(errno));
    const std::string tmpname(tmp.data());

    std::size_t off = 0;
    while (off < text.size()) {
        const ssize_t n = ::write(fd, text.data() + off, text.size() - off);
        if (n < 0) {
            ::close(fd);
            ::unlink(tmpname.c_str());
            throw io_error("write to '" + tmpname + "' failed: " + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
    if (::close(fd) != 0) {
        ::unlink(tmpname.c_str());
        throw io_error("close of '" + tmpname + "' failed: " + std::strerror(errno));
    }
    if (std::rename(tmpname.c_str(), path.c_str()) != 0) {
        ::unlink(tmpname.c_str());
        throw io_error("rename to '" + path + "' failed: " + std::strerror(errno));
    }
}

} // namespace ceit
