#include "ceit/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <queue>

#include "ceit/errors.hpp"
#include "ceit/model.hpp"

namespace ceit::oracle {

namespace {

using cd = std::complex<double>;

// QUADPACK dqk15 abscissae and weights on [-1, 1]. The 7-point Gauss rule
// shares the odd-index Kronrod nodes.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552591, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472782,
};
constexpr double kWg[4] = {
    0.12948496616886969, 0.27970539148927664,
    0.38183005050511894, 0.41795918367346938,
};

struct Interval {
    double a, b, err;
    cd val;
};

struct ByError {
    bool operator()(const Interval& x, const Interval& y) const { return x.err < y.err; }
};

Interval gk15(const std::function<cd(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cd fc = f(c);
    cd resk = kWgk[7] * fc;
    cd resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const cd lo = f(c - h * kXgk[j]);
        const cd hi = f(c + h * kXgk[j]);
        resk += kWgk[j] * (lo + hi);
        if (j % 2 == 1)
            resg += kWg[j / 2] * (lo + hi);
    }
    resk *= h;
    resg *= h;
    return {a, b, std::abs(resk - resg), resk};
}

[[noreturn]] void fail_tolerance(int intervals, double err) {
    throw quadrature_error("transverse quadrature did not reach tolerance after " +
                           std::to_string(intervals) + " intervals (error estimate " +
                           std::to_string(err) + ")");
}

double rel_dev(cd ref, cd other) {
    const double scale = std::max(std::abs(ref), 1e-300);
    return std::abs(ref - other) / scale;
}

} // namespace

QuadResult transverse_average(const std::function<cd(double)>& local_fn,
                              const QuadratureConfig& cfg) {
    if (!(cfg.rel_tol > 0.0))
        throw model_error("quadrature rel_tol must be positive");
    if (cfg.max_subdivisions < 8)
        throw model_error("quadrature max_subdivisions must be at least 8");
    const double abs_tol = cfg.abs_tol < 0.0 ? 0.0 : cfg.abs_tol;

    const auto integrand = [&](double u) { return local_fn(u) / u; };

    std::priority_queue<Interval, std::vector<Interval>, ByError> q;
    q.push(gk15(integrand, 0.0, 1.0));
    cd total = q.top().val;
    double err = q.top().err;
    int intervals = 1;
    while (err > std::max(abs_tol, cfg.rel_tol * std::abs(total))) {
        if (intervals >= cfg.max_subdivisions)
            fail_tolerance(intervals, err);
        const Interval worst = q.top();
        q.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Interval left = gk15(integrand, worst.a, mid);
        const Interval right = gk15(integrand, mid, worst.b);
        total += left.val + right.val - worst.val;
        err += left.err + right.err - worst.err;
        q.push(left);
        q.push(right);
        ++intervals;
    }
    return {total, err, intervals};
}

BlochResult bloch_steady_state(BlochScheme scheme, const AtomParams& atoms,
                               const DriveParams& drive, double omega_p, double delta) {
    atoms.validate(scheme == BlochScheme::lambda4);
    drive.validate();
    if (!(omega_p > 0.0) || omega_p > 1e-3 * atoms.gamma)
        throw model_error("bloch_steady_state requires 0 < omega_p <= 1e-3 * gamma");

    const cd i{0.0, 1.0};
    const cd b_c = drive.omega_c / std::sqrt(2.0);
    const cd b_s = drive.omega_s;
    const cd b_p = omega_p / 2.0;
    const cd d_opt{atoms.gamma, -delta};
    const cd d_gnd{atoms.gamma0, -delta};

    cd coherence;
    if (scheme == BlochScheme::lambda3) {
        Eigen::Matrix2cd m;
        m << d_opt, -i * b_c,
             -i * b_c, d_gnd;
        const Eigen::Matrix2cd inv = m.inverse();
        const double cond = m.cwiseAbs().colwise().sum().maxCoeff() *
                            inv.cwiseAbs().colwise().sum().maxCoeff();
        if (!(cond <= 1e14))
            throw singular_system_error("bloch 3-level system condition estimate " +
                                        std::to_string(cond));
        const Eigen::Vector2cd x = inv * Eigen::Vector2cd(i * b_p, cd{0.0, 0.0});
        coherence = x(0);
    } else {
        const cd d_sw{atoms.gamma_s, -drive.delta_s};
        Eigen::Matrix3cd m;
        m << d_opt, -i * b_c, cd{0.0, 0.0},
             -i * b_c, d_gnd, -i * b_s,
             cd{0.0, 0.0}, -i * b_s, d_sw;
        const Eigen::Matrix3cd inv = m.inverse();
        const double cond = m.cwiseAbs().colwise().sum().maxCoeff() *
                            inv.cwiseAbs().colwise().sum().maxCoeff();
        if (!(cond <= 1e14))
            throw singular_system_error("bloch 4-level system condition estimate " +
                                        std::to_string(cond));
        const Eigen::Vector3cd x = inv * Eigen::Vector3cd(i * b_p, cd{0.0, 0.0}, cd{0.0, 0.0});
        coherence = x(0);
    }
    const cd chi = atoms.g_n * atoms.g_n * coherence / b_p;
    return {coherence, chi};
}

std::complex<double> bloch_chi_local(BlochScheme scheme, const AtomParams& atoms,
                                     const DriveParams& drive, double omega_p,
                                     double delta, double u) {
    if (!(u > 0.0) || u > 1.0)
        throw model_error("transverse weight u must lie in (0, 1]");
    const double s = std::sqrt(u);
    DriveParams scaled = drive;
    scaled.omega_c = drive.omega_c * s;
    scaled.omega_s = drive.omega_s * s;
    // probe amplitude scales with sqrt(u) and the coupling with u; omega_p
    // cancels out of chi, so only the explicit u factor remains
    const BlochResult r = bloch_steady_state(scheme, atoms, scaled, omega_p * s, delta);
    return u * r.chi;
}

std::complex<double> chi_quad(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                              double delta, const QuadratureConfig& cfg) {
    QuadratureConfig resolved = cfg;
    if (resolved.abs_tol < 0.0)
        resolved.abs_tol = 1e-12 * atoms.g_n * atoms.g_n / atoms.gamma;
    if (mode == Mode::eit)
        return transverse_average(
                   [&](double u) { return chi_local_eit(atoms, drive.omega_c, delta, u); },
                   resolved)
            .value;
    if (mode == Mode::switching)
        return transverse_average(
                   [&](double u) { return chi_local_switch(atoms, drive, delta, u); },
                   resolved)
            .value;
    throw model_error("chi_quad supports eit and switch modes");
}

std::complex<double> chi_bloch_quad(Mode mode, const AtomParams& atoms,
                                    const DriveParams& drive, double omega_p, double delta,
                                    const QuadratureConfig& cfg) {
    const BlochScheme scheme =
        mode == Mode::eit ? BlochScheme::lambda3 : BlochScheme::lambda4;
    if (mode != Mode::eit && mode != Mode::switching)
        throw model_error("chi_bloch_quad supports eit and switch modes");
    QuadratureConfig resolved = cfg;
    if (resolved.abs_tol < 0.0)
        resolved.abs_tol = 1e-12 * atoms.g_n * atoms.g_n / atoms.gamma;
    return transverse_average(
               [&](double u) {
                   return bloch_chi_local(scheme, atoms, drive, omega_p, delta, u);
               },
               resolved)
        .value;
}

OracleReport oracle_report(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                           const std::vector<double>& deltas, const QuadratureConfig& cfg,
                           double omega_p) {
    if (deltas.empty())
        throw model_error("oracle_report requires a non-empty detuning grid");
    if (omega_p <= 0.0)
        omega_p = 1e-4 * atoms.gamma;
    OracleReport rep;
    rep.rows.reserve(deltas.size());
    for (const double d : deltas) {
        OracleRow row;
        row.delta = d;
        row.closed = chi_for_mode(mode, atoms, drive, d);
        row.quad = chi_quad(mode, atoms, drive, d, cfg);
        row.bloch = chi_bloch_quad(mode, atoms, drive, omega_p, d, cfg);
        row.rel_quad = rel_dev(row.closed, row.quad);
        row.rel_bloch = rel_dev(row.closed, row.bloch);
        rep.max_rel_quad = std::max(rep.max_rel_quad, row.rel_quad);
        rep.max_rel_bloch = std::max(rep.max_rel_bloch, row.rel_bloch);
        rep.mean_rel_quad += row.rel_quad;
        rep.mean_rel_bloch += row.rel_bloch;
        rep.rows.push_back(row);
    }
    rep.mean_rel_quad /= static_cast<double>(rep.rows.size());
    rep.mean_rel_bloch /= static_cast<double>(rep.rows.size());
    return rep;
}

} // namespace ceit::oracle
