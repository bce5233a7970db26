#pragma once

// 4-lane double-precision log and atan2 for the AVX2 kernel, accurate to a
// few ulp over the kernel's domain (positive normal inputs for vlog; |z| > 0
// for vatan2). Compiled only in the AVX2 translation unit.

#include <immintrin.h>

namespace ceit::kernels::avx2 {

// minimax polynomial for atan(r)/r in s = r^2 on [0,1]; coefficients from a
// degree-21 Chebyshev fit, max error 1.4e-17 after rounding to double.
// Highest power first.
inline constexpr double kAtanPoly[22] = {
    -0x1.156d8b1441eeep-17, 0x1.a2865ec94274cp-14, -0x1.2c4eeb1fa7a5bp-11,
    0x1.12060552e1b82p-9,  -0x1.6773524f49226p-8,  0x1.6c7238a2d8193p-7,
    -0x1.2d3ffbb3d4964p-6,  0x1.a91e0c9b2881ep-6, -0x1.0b657ae92d3e9p-5,
    0x1.385c01bcb507ap-5,  -0x1.5eda2e1403e06p-5,  0x1.849ab97c0d9e6p-5,
    -0x1.aed3667a4693ap-5,  0x1.e1d315290f292p-5, -0x1.1110151cb4f09p-4,
    0x1.3b1398601e89dp-4,  -0x1.745d1586bfed2p-4,  0x1.c71c71b1fed92p-4,
    -0x1.2492492443a94p-3,  0x1.999999999861ep-3, -0x1.5555555555546p-2,
    0x1.0000000000000p+0,
};

// atanh-series coefficients 1/(2k+1) for log; t = (m-1)/(m+1) with
// m in [sqrt(1/2), sqrt(2)) keeps t^2 <= 0.0295, so 12 terms reach 5e-20.
inline constexpr double kLogPoly[12] = {
    1.0 / 23.0, 1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0,
    1.0 / 11.0, 1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0,  1.0,
};

inline constexpr double kLn2Hi = 6.93147180369123816490e-01; // 0x3FE62E42FEE00000
inline constexpr double kLn2Lo = 1.90821492927058770002e-10; // 0x3DEA39EF35793C76
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kPi2 = 1.570796326794896619231321691639751442;

// natural log of positive normal doubles
inline __m256d vlog(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);

    // mantissa in [1,2), then rescale to [sqrt(1/2), sqrt(2))
    const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
    const __m256i one_bits  = _mm256_set1_epi64x(0x3ff0000000000000LL);
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    __m256i e64 = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52),
                                   _mm256_set1_epi64x(1023));
    const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
    const __m256d big = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e64 = _mm256_add_epi64(
        e64, _mm256_and_si256(_mm256_castpd_si256(big), _mm256_set1_epi64x(1)));

    // exponents are small signed ints; gather the low dwords and convert
    const __m256i lo_dwords = _mm256_permutevar8x32_epi32(
        e64, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
    const __m256d e = _mm256_cvtepi32_pd(_mm256_castsi256_si128(lo_dwords));

    // log(m) = 2 t (1 + t^2/3 + t^4/5 + ...), t = (m-1)/(m+1); m-1 is exact
    // by Sterbenz since m in [0.5, 2)
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s = _mm256_mul_pd(t, t);
    __m256d q = _mm256_set1_pd(kLogPoly[0]);
    for (int k = 1; k < 12; ++k)
        q = _mm256_fmadd_pd(q, s, _mm256_set1_pd(kLogPoly[k]));
    const __m256d lm = _mm256_mul_pd(_mm256_add_pd(t, t), q);

    const __m256d r = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), lm);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi), r);
}

// full-quadrant atan2; requires (x,y) != (0,0) per lane
inline __m256d vatan2(__m256d y, __m256d x) {
    const __m256d abs_mask = _mm256_castsi256_pd(
        _mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d sign_mask = _mm256_castsi256_pd(
        _mm256_set1_epi64x(0x8000000000000000LL));
    const __m256d ax = _mm256_and_pd(x, abs_mask);
    const __m256d ay = _mm256_and_pd(y, abs_mask);

    const __m256d num = _mm256_min_pd(ax, ay);
    const __m256d den = _mm256_max_pd(ax, ay);
    const __m256d r = _mm256_div_pd(num, den); // in [0,1]
    const __m256d s = _mm256_mul_pd(r, r);

    __m256d p = _mm256_set1_pd(kAtanPoly[0]);
    for (int k = 1; k < 22; ++k)
        p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(kAtanPoly[k]));
    __m256d t = _mm256_mul_pd(r, p); // atan(min/max) in [0, pi/4]

    const __m256d swap = _mm256_cmp_pd(ay, ax, _CMP_GT_OQ);
    t = _mm256_blendv_pd(t, _mm256_sub_pd(_mm256_set1_pd(kPi2), t), swap);
    const __m256d neg_x = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    t = _mm256_blendv_pd(t, _mm256_sub_pd(_mm256_set1_pd(kPi), t), neg_x);
    // t >= 0 here, so or-ing in y's sign bit is copysign(t, y)
    return _mm256_or_pd(t, _mm256_and_pd(y, sign_mask));
}

// complex lanes as separate re/im vectors
struct V4c {
    __m256d re, im;
};

inline V4c vc(double re, double im) {
    return {_mm256_set1_pd(re), _mm256_set1_pd(im)};
}

inline V4c vadd(V4c a, V4c b) {
    return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)};
}

inline V4c vmul(V4c a, V4c b) {
    return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
            _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

inline __m256d vsqabs(V4c a) {
    return _mm256_fmadd_pd(a.re, a.re, _mm256_mul_pd(a.im, a.im));
}

inline V4c vdiv(V4c a, V4c b) {
    const __m256d n = vsqabs(b);
    return {_mm256_div_pd(_mm256_fmadd_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)), n),
            _mm256_div_pd(_mm256_fmsub_pd(a.im, b.re, _mm256_mul_pd(a.re, b.im)), n)};
}

// principal log: 0.5 log|w|^2 + i arg(w)
inline V4c vclog(V4c w) {
    return {_mm256_mul_pd(_mm256_set1_pd(0.5), vlog(vsqabs(w))),
            vatan2(w.im, w.re)};
}

inline V4c vblend(V4c a, V4c b, __m256d mask) { // mask ? b : a
    return {_mm256_blendv_pd(a.re, b.re, mask), _mm256_blendv_pd(a.im, b.im, mask)};
}

} // namespace ceit::kernels::avx2
