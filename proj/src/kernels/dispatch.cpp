#include <complex>
#include <cstdlib>
#include <cstring>

#include "ceit/errors.hpp"
#include "kernels_impl.hpp"

namespace ceit::kernels {

namespace {

bool avx2_compiled_in() {
#ifdef CEIT_HAVE_AVX2
    return true;
#else
    return false;
#endif
}

Backend detect() {
    const char* env = std::getenv("CEIT_KERNEL");
    if (env && std::strcmp(env, "scalar") == 0)
        return Backend::scalar;
    if (env && std::strcmp(env, "avx2") == 0) {
        if (avx2_compiled_in() && cpu_has_avx2())
            return Backend::avx2;
        return Backend::scalar; // requested but unavailable; degrade quietly
    }
    // auto (also any unrecognized value)
    return (avx2_compiled_in() && cpu_has_avx2()) ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = detect();

detail::FlatParams flatten(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
                           const DriveParams& drive) {
    detail::FlatParams p{};
    p.mode = static_cast<int>(mode);
    p.kappa = cavity.kappa;
    p.kappa_in = cavity.kappa_in;
    p.g2 = atoms.g_n * atoms.g_n;
    p.gamma = atoms.gamma;
    p.gamma0 = atoms.gamma0;
    p.gamma_s = atoms.gamma_s;
    p.oc2_half = drive.omega_c * drive.omega_c / 2.0;
    p.os2 = drive.omega_s * drive.omega_s;
    p.delta_s = drive.delta_s;
    return p;
}

void validate_for_chi(Mode mode, const AtomParams& atoms, const DriveParams& drive) {
    if (mode == Mode::bare)
        return;
    atoms.validate(mode == Mode::switching);
    drive.validate();
}

} // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return g_backend; }

const char* backend_name() {
    return g_backend == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !(avx2_compiled_in() && cpu_has_avx2()))
        throw model_error("avx2 backend is not available on this build/CPU");
    g_backend = b;
}

void reset_backend() { g_backend = detect(); }

void eval_chi(Mode mode, const AtomParams& atoms, const DriveParams& drive,
              const double* delta, std::size_t n, std::complex<double>* chi) {
    validate_for_chi(mode, atoms, drive);
    if (n == 0)
        return;
#ifdef CEIT_HAVE_AVX2
    if (g_backend == Backend::avx2) {
        CavityParams unused_cavity; // chi does not touch the cavity fields
        unused_cavity.kappa = unused_cavity.kappa_in = 1.0;
        const detail::FlatParams p = flatten(mode, unused_cavity, atoms, drive);
        double bad_delta = 0.0;
        // std::complex<double> is layout-compatible with double[2]
        const int rc = detail::ceit_avx2_eval_chi(
            &p, delta, n, reinterpret_cast<double*>(chi), &bad_delta);
        if (rc != 0)
            throw branch_cut_error(bad_delta);
        return;
    }
#endif
    detail::eval_chi_scalar(mode, atoms, drive, delta, n, chi);
}

void eval_spectrum(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
                   const DriveParams& drive, const double* delta, std::size_t n,
                   double* refl, double* transp) {
    cavity.validate();
    validate_for_chi(mode, atoms, drive);
    if (n == 0 || (!refl && !transp))
        return;
#ifdef CEIT_HAVE_AVX2
    if (g_backend == Backend::avx2) {
        const detail::FlatParams p = flatten(mode, cavity, atoms, drive);
        double bad_delta = 0.0;
        const int rc = detail::ceit_avx2_eval_spectrum(&p, delta, n, refl, transp, &bad_delta);
        if (rc != 0)
            throw branch_cut_error(bad_delta);
        return;
    }
#endif
    detail::eval_spectrum_scalar(mode, cavity, atoms, drive, delta, n, refl, transp);
}

} // namespace ceit::kernels
