#pragma once

#include <complex>
#include <cstddef>

#include "ceit/params.hpp"

namespace ceit::kernels {

// Batch evaluation over detuning grids: the inner loop of spectrum synthesis
// and of every fit Jacobian. Two backends with identical semantics:
//   scalar - portable reference, bit-identical to the single-point API
//   avx2   - AVX2+FMA intrinsics, 4 detunings per iteration
// The backend is picked once at startup from CPU capabilities, overridable
// with CEIT_KERNEL=auto|scalar|avx2 or force_backend(). Cross-backend
// agreement (chi to 1e-12 relative, R and T/T0 to 1e-12 absolute) is
// enforced by tests.

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();   // "scalar" | "avx2"
bool cpu_has_avx2();

// test/tooling hooks; force_backend throws model_error if unsupported here
void force_backend(Backend b);
void reset_backend();         // back to env/CPU auto-selection

// susceptibility over a grid; bare mode writes zeros
void eval_chi(Mode mode, const AtomParams& atoms, const DriveParams& drive,
              const double* delta, std::size_t n, std::complex<double>* chi);

// reflectivity and/or normalized transmission over a grid; either output
// pointer may be null
void eval_spectrum(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
                   const DriveParams& drive, const double* delta, std::size_t n,
                   double* refl, double* transp);

} // namespace ceit::kernels
