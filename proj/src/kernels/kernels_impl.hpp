#pragma once

#include <complex>
#include <cstddef>

#include "ceit/kernels.hpp"
#include "kernels_abi.hpp"

namespace ceit::kernels::detail {

void eval_chi_scalar(Mode, const AtomParams&, const DriveParams&,
                     const double* delta, std::size_t n, std::complex<double>* chi);
void eval_spectrum_scalar(Mode, const CavityParams&, const AtomParams&,
                          const DriveParams&, const double* delta, std::size_t n,
                          double* refl, double* transp);

} // namespace ceit::kernels::detail
