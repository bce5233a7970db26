#include "kernels_impl.hpp"

#include "cxmath.hpp"

namespace ceit::kernels::detail {

using ceit::detail::cd;
using ceit::detail::chi_point;

void eval_chi_scalar(Mode mode, const AtomParams& atoms, const DriveParams& drive,
                     const double* delta, std::size_t n, std::complex<double>* chi) {
    for (std::size_t i = 0; i < n; ++i)
        chi[i] = chi_point(mode, atoms, drive, delta[i]);
}

void eval_spectrum_scalar(Mode mode, const CavityParams& cavity, const AtomParams& atoms,
                          const DriveParams& drive, const double* delta, std::size_t n,
                          double* refl, double* transp) {
    for (std::size_t i = 0; i < n; ++i) {
        const cd chi = chi_point(mode, atoms, drive, delta[i]);
        if (refl)
            refl[i] = ceit::detail::reflectivity_point(cavity, chi, delta[i]);
        if (transp)
            transp[i] = ceit::detail::transparency_point(cavity, chi, delta[i]);
    }
}

} // namespace ceit::kernels::detail
