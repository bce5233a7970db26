#include "ceit/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ceit/errors.hpp"
#include "ceit/features.hpp"
#include "ceit/kernels.hpp"

namespace ceit {

namespace {

const std::set<std::string> kParamNames = {"g_n",   "omega_c", "gamma0", "kappa",
                                           "gamma", "omega_s", "delta_s"};

bool is_log_param(const std::string& base) { return base != "delta_s"; }

struct ExpandedParam {
    std::string name;  // reported name, e.g. omega_c[3]
    std::string base;  // model field, e.g. omega_c
    int spectrum = -1; // -1 = shared
    double lo = 0.0, hi = 0.0, init = 0.0;
};

std::vector<ExpandedParam> expand(const FitProblem& problem) {
    std::vector<ExpandedParam> out;
    const bool multi = problem.spectra.size() > 1;
    for (const FitParamSpec& spec : problem.free_params) {
        if (spec.name == "omega_c" && multi) {
            for (std::size_t i = 0; i < problem.spectra.size(); ++i)
                out.push_back({"omega_c[" + std::to_string(i) + "]", "omega_c",
                               static_cast<int>(i), spec.lo, spec.hi, spec.init});
        } else {
            out.push_back({spec.name, spec.name, -1, spec.lo, spec.hi, spec.init});
        }
    }
    return out;
}

void apply_param(const std::string& base, double value, CavityParams& cavity,
                 AtomParams& atoms, DriveParams& drive) {
    if (base == "g_n")
        atoms.g_n = value;
    else if (base == "gamma")
        atoms.gamma = value;
    else if (base == "gamma0")
        atoms.gamma0 = value;
    else if (base == "kappa")
        cavity.kappa = value;
    else if (base == "omega_c")
        drive.omega_c = value;
    else if (base == "omega_s")
        drive.omega_s = value;
    else
        drive.delta_s = value;
}

struct SpectrumParams {
    CavityParams cavity;
    AtomParams atoms;
    DriveParams drive;
};

SpectrumParams params_for(const FitProblem& problem, const std::vector<ExpandedParam>& ps,
                          const std::vector<double>& values, std::size_t spectrum) {
    const Spectrum& s = problem.spectra[spectrum];
    SpectrumParams out{s.cavity, s.atoms, s.drive};
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (ps[j].spectrum < 0 || ps[j].spectrum == static_cast<int>(spectrum))
            apply_param(ps[j].base, values[j], out.cavity, out.atoms, out.drive);
    return out;
}

void eval_residuals(const FitProblem& problem, const std::vector<ExpandedParam>& ps,
                    const std::vector<double>& values, std::vector<double>& out) {
    out.clear();
    std::vector<double> model;
    for (std::size_t i = 0; i < problem.spectra.size(); ++i) {
        const Spectrum& s = problem.spectra[i];
        const SpectrumParams p = params_for(problem, ps, values, i);
        model.resize(s.size());
        try {
            kernels::eval_spectrum(s.mode, p.cavity, p.atoms, p.drive, s.delta.data(),
                                   s.size(), model.data(), nullptr);
        } catch (const std::runtime_error& e) {
            throw fit_error("model evaluation failed on spectrum " + std::to_string(i) +
                            ": " + e.what());
        }
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double w = s.sigma[k] > 0.0 ? s.sigma[k] : 1.0;
            out.push_back((model[k] - s.refl[k]) / w);
        }
    }
}

double cost_of(const std::vector<double>& r) {
    double c = 0.0;
    for (const double v : r)
        c += v * v;
    return c;
}

// internal coordinates: z = log(p) for rates, z = p for delta_s
double to_internal(const ExpandedParam& p, double v) {
    return is_log_param(p.base) ? std::log(v) : v;
}

double from_internal(const ExpandedParam& p, double z) {
    return is_log_param(p.base) ? std::exp(z) : z;
}

double diff_step(const ExpandedParam& p, double value) {
    if (is_log_param(p.base))
        return 1e-6; // in log space: a 1e-6 relative step on the parameter
    return 1e-6 * std::max(std::fabs(value), 1e-4 * (p.hi - p.lo));
}

bool in_bounds(const std::vector<ExpandedParam>& ps, const std::vector<double>& values) {
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (!(values[j] >= ps[j].lo && values[j] <= ps[j].hi))
            return false;
    return true;
}

Eigen::MatrixXd jacobian(const FitProblem& problem, const std::vector<ExpandedParam>& ps,
                         const std::vector<double>& values,
                         const std::vector<double>& r0) {
    const std::size_t m = ps.size();
    Eigen::MatrixXd J(static_cast<Eigen::Index>(r0.size()), static_cast<Eigen::Index>(m));
    std::vector<double> perturbed = values;
    std::vector<double> r;
    for (std::size_t j = 0; j < m; ++j) {
        const double z = to_internal(ps[j], values[j]);
        const double h = diff_step(ps[j], values[j]);
        perturbed[j] = from_internal(ps[j], z + h);
        eval_residuals(problem, ps, perturbed, r);
        for (std::size_t k = 0; k < r.size(); ++k)
            J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                (r[k] - r0[k]) / h;
        perturbed[j] = values[j];
    }
    return J;
}

FitResult run_fit(const FitProblem& problem) {
    problem.validate();
    const std::vector<ExpandedParam> ps = expand(problem);
    const std::size_t m = ps.size();

    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j)
        values[j] = ps[j].init;

    std::vector<double> r;
    eval_residuals(problem, ps, values, r);
    const std::size_t n = r.size();
    if (n < m)
        throw fit_error("fewer residuals than free parameters");
    double cost = cost_of(r);

    FitResult result;
    result.cost_trace.push_back(cost);

    double lambda = -1.0;
    bool converged = false;
    bool stalled = false;
    int iter = 0;
    std::vector<double> trial(m);
    std::vector<double> rt;
    while (iter < problem.options.max_iterations && !converged && !stalled) {
        ++iter;
        const Eigen::MatrixXd J = jacobian(problem, ps, values, r);
        const Eigen::VectorXd rv =
            Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd g = 2.0 * (J.transpose() * rv);
        if (g.lpNorm<Eigen::Infinity>() < problem.options.grad_tol) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd N = J.transpose() * J;
        if (lambda < 0.0)
            lambda = 1e-3 * N.diagonal().maxCoeff();

        int rejects = 0;
        while (true) {
            Eigen::MatrixXd damped = N;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd step = damped.ldlt().solve(-0.5 * g);

            bool ok = step.allFinite();
            if (ok) {
                for (std::size_t j = 0; j < m; ++j)
                    trial[j] = from_internal(
                        ps[j], to_internal(ps[j], values[j]) +
                                   step(static_cast<Eigen::Index>(j)));
                ok = in_bounds(ps, trial);
            }
            double trial_cost = std::numeric_limits<double>::infinity();
            if (ok) {
                try {
                    eval_residuals(problem, ps, trial, rt);
                    trial_cost = cost_of(rt);
                } catch (const fit_error&) {
                    trial_cost = std::numeric_limits<double>::infinity();
                }
            }
            if (trial_cost < cost) {
                const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
                values = trial;
                r = rt;
                cost = trial_cost;
                result.cost_trace.push_back(cost);
                lambda = std::max(lambda / 10.0, 1e-300);
                if (rel < problem.options.cost_tol)
                    converged = true;
                break;
            }
            lambda *= 10.0;
            if (++rejects >= 60) {
                stalled = true; // give up, keep best-so-far
                break;
            }
        }
    }

    result.iterations = iter;
    result.converged = converged;
    result.cost = cost;
    result.n_residuals = n;
    result.values = values;
    result.names.reserve(m);
    for (const ExpandedParam& p : ps)
        result.names.push_back(p.name);

    result.reduced_chi2 = n > m ? cost / static_cast<double>(n - m) : 0.0;

    // one-sigma uncertainties from the quadratic model at the optimum
    const Eigen::MatrixXd J = jacobian(problem, ps, values, r);
    const Eigen::MatrixXd N = J.transpose() * J;
    const Eigen::MatrixXd cov =
        N.fullPivLu().isInvertible()
            ? Eigen::MatrixXd(N.fullPivLu().inverse() * result.reduced_chi2)
            : Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                    static_cast<Eigen::Index>(m));
    result.sigmas.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double var = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        const double sz = var > 0.0 ? std::sqrt(var) : 0.0;
        result.sigmas[j] = is_log_param(ps[j].base) ? values[j] * sz : sz;
    }

    result.per_spectrum_cost.assign(problem.spectra.size(), 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < problem.spectra.size(); ++i)
        for (std::size_t s = 0; s < problem.spectra[i].size(); ++s, ++k)
            result.per_spectrum_cost[i] += r[k] * r[k];
    return result;
}

double feature_value(FeatureKind kind, const SpectrumParams& p, Mode mode) {
    switch (kind) {
    case FeatureKind::transparency:
        return extract_max_transparency(p.cavity, p.atoms, p.drive, mode).value;
    case FeatureKind::hwhm:
        return extract_hwhm(p.cavity, p.atoms, p.drive);
    case FeatureKind::shift:
        return extract_resonance_shift(p.cavity, p.atoms, p.drive);
    }
    throw feature_error("unknown feature kind");
}

} // namespace

void FitProblem::validate() const {
    if (spectra.empty())
        throw model_error("fit problem needs at least one spectrum");
    for (const Spectrum& s : spectra)
        s.validate();
    if (free_params.empty())
        throw model_error("fit problem needs at least one free parameter");
    std::set<std::string> seen;
    for (const FitParamSpec& p : free_params) {
        if (!kParamNames.count(p.name))
            throw model_error("unknown fit parameter '" + p.name + "'");
        if (!seen.insert(p.name).second)
            throw model_error("duplicate fit parameter '" + p.name + "'");
        if (!(std::isfinite(p.lo) && std::isfinite(p.hi) && p.lo < p.hi))
            throw model_error("fit parameter '" + p.name + "' needs finite bounds lo < hi");
        if (!(p.init >= p.lo && p.init <= p.hi))
            throw model_error("fit parameter '" + p.name + "' initial value out of bounds");
        if (is_log_param(p.name) && !(p.lo > 0.0))
            throw model_error("fit parameter '" + p.name + "' needs a positive lower bound");
    }
}

std::vector<std::string> expanded_names(const FitProblem& problem) {
    problem.validate();
    std::vector<std::string> names;
    for (const ExpandedParam& p : expand(problem))
        names.push_back(p.name);
    return names;
}

std::vector<double> residuals(const FitProblem& problem, const std::vector<double>& values) {
    problem.validate();
    const std::vector<ExpandedParam> ps = expand(problem);
    if (values.size() != ps.size())
        throw model_error("expected " + std::to_string(ps.size()) + " parameter values");
    std::vector<double> r;
    eval_residuals(problem, ps, values, r);
    return r;
}

std::vector<double> fit_numeric_jacobian(const FitProblem& problem,
                                         const std::vector<double>& values) {
    problem.validate();
    const std::vector<ExpandedParam> ps = expand(problem);
    if (values.size() != ps.size())
        throw model_error("expected " + std::to_string(ps.size()) + " parameter values");
    std::vector<double> r0;
    eval_residuals(problem, ps, values, r0);
    const Eigen::MatrixXd J = jacobian(problem, ps, values, r0);
    std::vector<double> out(static_cast<std::size_t>(J.rows()) *
                            static_cast<std::size_t>(J.cols()));
    for (Eigen::Index i = 0; i < J.rows(); ++i)
        for (Eigen::Index j = 0; j < J.cols(); ++j)
            out[static_cast<std::size_t>(i) * static_cast<std::size_t>(J.cols()) +
                static_cast<std::size_t>(j)] = J(i, j);
    return out;
}

FitResult fit(const FitProblem& problem) { return run_fit(problem); }

FitResult fit_global(const FitProblem& problem) {
    if (problem.spectra.size() < 2)
        throw model_error("global fit needs at least two spectra");
    const bool has_gamma0 =
        std::any_of(problem.free_params.begin(), problem.free_params.end(),
                    [](const FitParamSpec& p) { return p.name == "gamma0"; });
    if (!has_gamma0)
        throw model_error("global fit needs gamma0 among the free parameters");
    return run_fit(problem);
}

SensitivityBand sensitivity_band(const FitProblem& problem,
                                 const std::vector<double>& values,
                                 const std::string& param, double relative_range,
                                 FeatureKind kind) {
    problem.validate();
    if (!(relative_range >= 0.0))
        throw model_error("relative_range must be >= 0");
    const std::vector<ExpandedParam> ps = expand(problem);
    if (values.size() != ps.size())
        throw model_error("expected " + std::to_string(ps.size()) + " parameter values");
    std::size_t target = ps.size();
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (ps[j].name == param)
            target = j;
    if (target == ps.size())
        throw model_error("parameter '" + param + "' is not free in this problem");

    SensitivityBand band;
    const double scales[3] = {1.0, 1.0 - relative_range, 1.0 + relative_range};
    for (std::size_t i = 0; i < problem.spectra.size(); ++i) {
        double lo = 0.0, hi = 0.0, center = 0.0;
        for (int si = 0; si < 3; ++si) {
            std::vector<double> scaled = values;
            scaled[target] = values[target] * scales[si];

            std::vector<double> applied = scaled;
            if (ps.size() > 1 && relative_range > 0.0 && si > 0) {
                // re-optimize the other free parameters with `param` pinned:
                // bake the pinned value into the snapshots and drop it
                FitProblem sub = problem;
                for (std::size_t b = 0; b < ps.size(); ++b) {
                    if (ps[b].base != ps[target].base)
                        continue;
                    for (std::size_t sidx = 0; sidx < sub.spectra.size(); ++sidx) {
                        if (ps[b].spectrum >= 0 &&
                            ps[b].spectrum != static_cast<int>(sidx))
                            continue;
                        Spectrum& s = sub.spectra[sidx];
                        apply_param(ps[b].base, scaled[b], s.cavity, s.atoms, s.drive);
                    }
                }
                sub.free_params.clear();
                for (const FitParamSpec& spec : problem.free_params) {
                    if (spec.name == ps[target].base)
                        continue;
                    FitParamSpec warm = spec;
                    for (std::size_t b = 0; b < ps.size(); ++b)
                        if (ps[b].base == spec.name) {
                            warm.init = std::min(std::max(values[b], spec.lo), spec.hi);
                            break;
                        }
                    sub.free_params.push_back(warm);
                }
                if (!sub.free_params.empty()) {
                    const FitResult r = run_fit(sub);
                    // map the sub-fit values back into the full vector
                    const std::vector<ExpandedParam> sub_ps = expand(sub);
                    for (std::size_t a = 0; a < sub_ps.size(); ++a)
                        for (std::size_t b = 0; b < ps.size(); ++b)
                            if (ps[b].name == sub_ps[a].name)
                                applied[b] = r.values[a];
                }
            }

            const SpectrumParams p = params_for(problem, ps, applied, i);
            const double v = feature_value(kind, p, problem.spectra[i].mode);
            if (si == 0) {
                center = lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        band.center.push_back(center);
        band.low.push_back(lo);
        band.high.push_back(hi);
    }
    return band;
}

std::vector<SelftestEntry> fit_selftest(std::uint64_t seed) {
    std::vector<SelftestEntry> report;
    const double ratio = mirror_budget_to_kappa_ratio(1500.0, 4.0, 650.0);

    CavityParams cavity;
    cavity.kappa = 2.2e6;
    cavity.kappa_in = ratio * cavity.kappa;

    const auto record = [&report](const std::string& name, double value, double expected,
                                  double tol) {
        SelftestEntry e;
        e.name = name;
        e.value = value;
        e.expected = expected;
        e.rel_err = std::fabs(value - expected) / std::fabs(expected);
        e.tol = tol;
        e.pass = e.rel_err <= tol;
        report.push_back(e);
    };

    { // two_level, recover g_n from a noiseless spectrum
        AtomParams atoms;
        atoms.g_n = 13.8e6;
        atoms.gamma = 12.6e6;
        atoms.gamma0 = 600.0;
        FitProblem prob;
        prob.spectra.push_back(simulate_spectrum(cavity, atoms, DriveParams{},
                                                 DetuningGrid{-4e7, 4e7, 801},
                                                 Mode::two_level));
        prob.free_params.push_back({"g_n", 1.0e7, 1.0e6, 1.0e8});
        const FitResult r = fit(prob);
        record("two_level_g_n", r.values[0], atoms.g_n, 1e-4);
    }

    { // eit, recover (g_n, omega_c) from a noiseless spectrum
        AtomParams atoms;
        atoms.g_n = 13.5e6;
        atoms.gamma = 12.6e6;
        atoms.gamma0 = 600.0;
        DriveParams drive;
        drive.omega_c = 4.1e6;
        FitProblem prob;
        prob.spectra.push_back(simulate_spectrum(cavity, atoms, drive,
                                                 DetuningGrid{-2e6, 2e6, 2001}, Mode::eit));
        prob.free_params.push_back({"g_n", 1.0e7, 1.0e6, 1.0e8});
        prob.free_params.push_back({"omega_c", 3.0e6, 1.0e5, 1.0e8});
        const FitResult r = fit(prob);
        // report whichever of (g_n, omega_c) came out worse
        const double e0 = std::fabs(r.values[0] - atoms.g_n) / atoms.g_n;
        const double e1 = std::fabs(r.values[1] - drive.omega_c) / drive.omega_c;
        if (e0 >= e1)
            record("eit_g_n_omega_c", r.values[0], atoms.g_n, 1e-3);
        else
            record("eit_g_n_omega_c", r.values[1], drive.omega_c, 1e-3);
    }

    { // global gamma0 across 11 noisy spectra
        AtomParams atoms;
        atoms.g_n = std::sqrt(2.0 * 5.4 * 2.2e6 * 12.6e6);
        atoms.gamma = 12.6e6;
        atoms.gamma0 = 600.0;
        FitProblem prob;
        for (int i = 0; i < 11; ++i) {
            DriveParams drive;
            drive.omega_c = 1.3e6 + (8.6e6 - 1.3e6) * i / 10.0;
            Spectrum s = simulate_spectrum(cavity, atoms, drive,
                                           DetuningGrid{-4e5, 4e5, 4001}, Mode::eit);
            prob.spectra.push_back(add_noise(s, 0.02, seed + static_cast<std::uint64_t>(i)));
        }
        prob.free_params.push_back({"gamma0", 300.0, 10.0, 1.0e4});
        const FitResult r = fit_global(prob);
        record("global_gamma0", r.values[0], atoms.gamma0, 0.05);
    }
    return report;
}

} // namespace ceit
