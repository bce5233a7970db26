// AVX2+FMA batch kernels. POD interface only; see kernels_impl.hpp.

#ifdef CEIT_HAVE_AVX2

#include <cstddef>
#include <immintrin.h>

#include "kernels_abi.hpp"
#include "vecmath_avx2.hpp"

namespace {

using namespace ceit::kernels::avx2;
using ceit::kernels::detail::FlatParams;

constexpr int kModeBare = 0, kModeTwoLevel = 1, kModeEit = 2, kModeSwitch = 3;
constexpr double kSeriesThresholdSq = 1e-8;
constexpr double kBranchTol = 1e-12;

// B = 1 - Theta (1/2 - S/3 + S^2/4 - S^3/5 + S^4/6)
inline V4c series_shape(V4c th, V4c S) {
    V4c p = vc(1.0 / 6.0, 0.0);
    p = vadd(vmul(p, S), vc(-1.0 / 5.0, 0.0));
    p = vadd(vmul(p, S), vc(1.0 / 4.0, 0.0));
    p = vadd(vmul(p, S), vc(-1.0 / 3.0, 0.0));
    p = vadd(vmul(p, S), vc(1.0 / 2.0, 0.0));
    V4c r = vmul(th, p);
    return {_mm256_sub_pd(_mm256_set1_pd(1.0), r.re), _mm256_sub_pd(_mm256_setzero_pd(), r.im)};
}

// ((Theta/S) ln(1+S) + Theta_s)/S with the small-|S| series blend; returns
// false and sets *bad_delta when a lane lands on the log branch cut
inline bool switch_shape(V4c th, V4c ths, const double* delta_lanes, V4c* out,
                         double* bad_delta) {
    const V4c S = vadd(th, ths);
    const __m256d sq = vsqabs(S);
    const __m256d series_mask =
        _mm256_cmp_pd(sq, _mm256_set1_pd(kSeriesThresholdSq), _CMP_LT_OQ);

    const V4c w = {_mm256_add_pd(_mm256_set1_pd(1.0), S.re), S.im};
    const __m256d abs_mask =
        _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d tol = _mm256_set1_pd(kBranchTol);
    __m256d cut = _mm256_and_pd(_mm256_cmp_pd(w.re, tol, _CMP_LE_OQ),
                                _mm256_cmp_pd(_mm256_and_pd(w.im, abs_mask), tol,
                                              _CMP_LE_OQ));
    cut = _mm256_andnot_pd(series_mask, cut);
    const int cut_bits = _mm256_movemask_pd(cut);
    if (cut_bits) {
        for (int lane = 0; lane < 4; ++lane)
            if (cut_bits & (1 << lane)) {
                *bad_delta = delta_lanes[lane];
                return false;
            }
    }

    const int series_bits = _mm256_movemask_pd(series_mask);
    if (series_bits == 0xF) {
        *out = series_shape(th, S);
        return true;
    }
    V4c B = vdiv(vadd(vmul(vdiv(th, S), vclog(w)), ths), S);
    if (series_bits)
        B = vblend(B, series_shape(th, S), series_mask);
    *out = B;
    return true;
}

// chi for one 4-lane block; delta_lanes mirrors nd = -delta for error reports
inline bool chi_block(const FlatParams* p, __m256d nd, const double* delta_lanes,
                      V4c* chi, double* bad_delta) {
    const V4c D = {_mm256_set1_pd(p->gamma), nd};
    const V4c pref = vdiv(vc(0.0, p->g2), D);
    if (p->mode == kModeBare) {
        *chi = vc(0.0, 0.0);
        return true;
    }
    if (p->mode == kModeTwoLevel) {
        *chi = pref;
        return true;
    }
    const V4c G = {_mm256_set1_pd(p->gamma0), nd};
    const V4c th = vdiv(vc(p->oc2_half, 0.0), vmul(D, G));
    V4c ths = vc(0.0, 0.0);
    if (p->mode == kModeSwitch) {
        const V4c Gs = vc(p->gamma_s, -p->delta_s);
        ths = vdiv(vc(p->os2, 0.0), vmul(Gs, G));
    }
    V4c B;
    if (!switch_shape(th, ths, delta_lanes, &B, bad_delta))
        return false;
    *chi = vmul(pref, B);
    return true;
}

inline void store_interleaved(double* dst, V4c v) {
    const __m256d lo = _mm256_unpacklo_pd(v.re, v.im); // re0 im0 re2 im2
    const __m256d hi = _mm256_unpackhi_pd(v.re, v.im); // re1 im1 re3 im3
    _mm256_storeu_pd(dst, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(dst + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

// last partial block: lanes padded by replicating the final delta
inline __m256d load_padded(const double* delta, std::size_t n, std::size_t i,
                           double* lanes) {
    for (std::size_t k = 0; k < 4; ++k)
        lanes[k] = delta[i + k < n ? i + k : n - 1];
    return _mm256_loadu_pd(lanes);
}

} // namespace

extern "C" int ceit_avx2_eval_chi(const FlatParams* p, const double* delta,
                                  std::size_t n, double* chi_interleaved,
                                  double* bad_delta) {
    double lanes[4];
    for (std::size_t i = 0; i < n; i += 4) {
        __m256d d;
        if (i + 4 <= n) {
            d = _mm256_loadu_pd(delta + i);
            lanes[0] = delta[i]; lanes[1] = delta[i + 1];
            lanes[2] = delta[i + 2]; lanes[3] = delta[i + 3];
        } else {
            d = load_padded(delta, n, i, lanes);
        }
        const __m256d nd = _mm256_sub_pd(_mm256_setzero_pd(), d);
        V4c chi;
        if (!chi_block(p, nd, lanes, &chi, bad_delta))
            return 1;
        if (i + 4 <= n) {
            store_interleaved(chi_interleaved + 2 * i, chi);
        } else {
            double buf[8];
            store_interleaved(buf, chi);
            for (std::size_t k = 0; i + k < n; ++k) {
                chi_interleaved[2 * (i + k)] = buf[2 * k];
                chi_interleaved[2 * (i + k) + 1] = buf[2 * k + 1];
            }
        }
    }
    return 0;
}

extern "C" int ceit_avx2_eval_spectrum(const FlatParams* p, const double* delta,
                                       std::size_t n, double* refl, double* transp,
                                       double* bad_delta) {
    const __m256d kap = _mm256_set1_pd(p->kappa);
    const __m256d two_kin = _mm256_set1_pd(2.0 * p->kappa_in);
    const __m256d kap2 = _mm256_mul_pd(kap, kap);
    const __m256d one = _mm256_set1_pd(1.0);
    double lanes[4];
    for (std::size_t i = 0; i < n; i += 4) {
        __m256d d;
        if (i + 4 <= n) {
            d = _mm256_loadu_pd(delta + i);
            lanes[0] = delta[i]; lanes[1] = delta[i + 1];
            lanes[2] = delta[i + 2]; lanes[3] = delta[i + 3];
        } else {
            d = load_padded(delta, n, i, lanes);
        }
        const __m256d nd = _mm256_sub_pd(_mm256_setzero_pd(), d);
        V4c chi;
        if (!chi_block(p, nd, lanes, &chi, bad_delta))
            return 1;
        // Deff = (kappa + Im chi) - i (delta + Re chi)
        const V4c deff = {_mm256_add_pd(kap, chi.im), _mm256_sub_pd(nd, chi.re)};
        __m256d r{}, t{};
        if (refl) {
            const V4c w = vdiv({two_kin, _mm256_setzero_pd()}, deff);
            const __m256d re1 = _mm256_sub_pd(w.re, one);
            r = _mm256_fmadd_pd(re1, re1, _mm256_mul_pd(w.im, w.im));
        }
        if (transp)
            t = _mm256_div_pd(kap2, vsqabs(deff));
        if (i + 4 <= n) {
            if (refl)
                _mm256_storeu_pd(refl + i, r);
            if (transp)
                _mm256_storeu_pd(transp + i, t);
        } else {
            double rb[4], tb[4];
            if (refl)
                _mm256_storeu_pd(rb, r);
            if (transp)
                _mm256_storeu_pd(tb, t);
            for (std::size_t k = 0; i + k < n; ++k) {
                if (refl)
                    refl[i + k] = rb[k];
                if (transp)
                    transp[i + k] = tb[k];
            }
        }
    }
    return 0;
}

extern "C" void ceit_avx2_vlog(const double* in, double* out, std::size_t n) {
    double buf[4];
    for (std::size_t i = 0; i < n; i += 4) {
        for (std::size_t k = 0; k < 4; ++k)
            buf[k] = in[i + k < n ? i + k : n - 1];
        _mm256_storeu_pd(buf, ceit::kernels::avx2::vlog(_mm256_loadu_pd(buf)));
        for (std::size_t k = 0; k < 4 && i + k < n; ++k)
            out[i + k] = buf[k];
    }
}

extern "C" void ceit_avx2_vatan2(const double* y, const double* x, double* out,
                                 std::size_t n) {
    double by[4], bx[4];
    for (std::size_t i = 0; i < n; i += 4) {
        for (std::size_t k = 0; k < 4; ++k) {
            by[k] = y[i + k < n ? i + k : n - 1];
            bx[k] = x[i + k < n ? i + k : n - 1];
        }
        _mm256_storeu_pd(by, ceit::kernels::avx2::vatan2(_mm256_loadu_pd(by),
                                                         _mm256_loadu_pd(bx)));
        for (std::size_t k = 0; k < 4 && i + k < n; ++k)
            out[i + k] = by[k];
    }
}

#endif // CEIT_HAVE_AVX2
