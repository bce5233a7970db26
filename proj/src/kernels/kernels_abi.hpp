#pragma once

#include <cstddef>

// Flat parameter block shared with the AVX2 translation unit. That TU is
// compiled with -mavx2 -mfma and deliberately exposes a POD-only interface:
// no std::string, no exceptions, no inline library code that the linker
// could fold with baseline-ISA instantiations. Errors come back as a status
// code (0 ok, 1 branch cut at bad_delta) and the dispatcher throws.

namespace ceit::kernels::detail {

struct FlatParams {
    int mode;           // static_cast<int>(Mode)
    double kappa, kappa_in;
    double g2;          // g_n^2
    double gamma, gamma0, gamma_s;
    double oc2_half;    // omega_c^2 / 2
    double os2;         // omega_s^2
    double delta_s;
};

extern "C" {
int ceit_avx2_eval_chi(const FlatParams* p, const double* delta, std::size_t n,
                       double* chi_interleaved, double* bad_delta);
int ceit_avx2_eval_spectrum(const FlatParams* p, const double* delta, std::size_t n,
                            double* refl, double* transp, double* bad_delta);
// accuracy-test hooks for the vector transcendentals
void ceit_avx2_vlog(const double* in, double* out, std::size_t n);
void ceit_avx2_vatan2(const double* y, const double* x, double* out, std::size_t n);
}

} // namespace ceit::kernels::detail
