#pragma once

// Four-lane double vector used by the grid-evaluation kernels. AVX2 on
// x86-64 when the translation unit is compiled with -mavx2 -mfma; a plain
// array fallback elsewhere. Include this header only from kernel TUs so a
// single backend is active per binary.

#include <cstdint>
#include <cstring>
#include <cmath>

#if defined(__AVX2__) && defined(__FMA__) && defined(__x86_64__) && !defined(VALET_FORCE_PORTABLE_VEC)
#define VALET_VEC4D_AVX2 1
#include <immintrin.h>
#else
#define VALET_VEC4D_PORTABLE 1
#endif

namespace valet::kernels {

#if defined(VALET_VEC4D_AVX2)

struct vec4d {
    __m256d v;

    static vec4d load(const double* p) { return {_mm256_loadu_pd(p)}; }
    static vec4d broadcast(double x) { return {_mm256_set1_pd(x)}; }
    void store(double* p) const { _mm256_storeu_pd(p, v); }

    friend vec4d operator+(vec4d a, vec4d b) { return {_mm256_add_pd(a.v, b.v)}; }
    friend vec4d operator-(vec4d a, vec4d b) { return {_mm256_sub_pd(a.v, b.v)}; }
    friend vec4d operator*(vec4d a, vec4d b) { return {_mm256_mul_pd(a.v, b.v)}; }
    friend vec4d operator/(vec4d a, vec4d b) { return {_mm256_div_pd(a.v, b.v)}; }
};

inline vec4d vmin(vec4d a, vec4d b) { return {_mm256_min_pd(a.v, b.v)}; }
inline vec4d vmax(vec4d a, vec4d b) { return {_mm256_max_pd(a.v, b.v)}; }
inline vec4d vsqrt(vec4d a) { return {_mm256_sqrt_pd(a.v)}; }
inline vec4d vabs(vec4d a) {
    return {_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v)};
}
inline vec4d vfma(vec4d a, vec4d b, vec4d c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }

// Comparisons yield all-ones / all-zero lane masks.
inline vec4d cmp_gt(vec4d a, vec4d b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
inline vec4d cmp_ge(vec4d a, vec4d b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
inline vec4d cmp_lt(vec4d a, vec4d b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
inline vec4d blend(vec4d mask, vec4d a, vec4d b) {
    return {_mm256_blendv_pd(b.v, a.v, mask.v)};
}
inline vec4d vand(vec4d a, vec4d b) { return {_mm256_and_pd(a.v, b.v)}; }
inline vec4d vor(vec4d a, vec4d b) { return {_mm256_or_pd(a.v, b.v)}; }

// x * 2^n for integral-valued n in [-1022, 1023], via exponent bits.
inline vec4d ldexp_fast(vec4d x, vec4d n) {
    const __m256d magic = _mm256_set1_pd(4503599627370496.0 + 1023.0);  // 2^52 + bias
    const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n.v, magic));
    const __m256d pow2 = _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
    return {_mm256_mul_pd(x.v, pow2)};
}

// Split a positive normal x into m * 2^e with m in [0.5, 1).
inline void frexp_norm(vec4d x, vec4d& m, vec4d& e) {
    const __m256i bits = _mm256_castpd_si256(x.v);
    const __m256i expo = _mm256_srli_epi64(bits, 52);  // biased exponent, [1, 2046]
    const __m256i as_int = _mm256_or_si256(expo, _mm256_set1_epi64x(0x4330000000000000LL));
    e = {_mm256_sub_pd(_mm256_castsi256_pd(as_int),
                       _mm256_set1_pd(4503599627370496.0 + 1022.0))};
    const __m256i mant = _mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
        _mm256_set1_epi64x(0x3FE0000000000000LL));
    m = {_mm256_castsi256_pd(mant)};
}

#else  // portable fallback

struct vec4d {
    double v[4];

    static vec4d load(const double* p) { return {{p[0], p[1], p[2], p[3]}}; }
    static vec4d broadcast(double x) { return {{x, x, x, x}}; }
    void store(double* p) const {
        for (int i = 0; i < 4; ++i) p[i] = v[i];
    }

    friend vec4d operator+(vec4d a, vec4d b) {
        vec4d r;
        for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] + b.v[i];
        return r;
    }
    friend vec4d operator-(vec4d a, vec4d b) {
        vec4d r;
        for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] - b.v[i];
        return r;
    }
    friend vec4d operator*(vec4d a, vec4d b) {
        vec4d r;
        for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] * b.v[i];
        return r;
    }
    friend vec4d operator/(vec4d a, vec4d b) {
        vec4d r;
        for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] / b.v[i];
        return r;
    }
};

namespace detail {
inline uint64_t bits_of(double x) {
    uint64_t u;
    std::memcpy(&u, &x, 8);
    return u;
}
inline double double_of(uint64_t u) {
    double x;
    std::memcpy(&x, &u, 8);
    return x;
}
constexpr uint64_t kAllOnes = ~uint64_t{0};
}  // namespace detail

inline vec4d vmin(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = b.v[i] < a.v[i] ? b.v[i] : a.v[i];
    return r;
}
inline vec4d vmax(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = a.v[i] < b.v[i] ? b.v[i] : a.v[i];
    return r;
}
inline vec4d vsqrt(vec4d a) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = std::sqrt(a.v[i]);
    return r;
}
inline vec4d vabs(vec4d a) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = std::fabs(a.v[i]);
    return r;
}
inline vec4d vfma(vec4d a, vec4d b, vec4d c) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = std::fma(a.v[i], b.v[i], c.v[i]);
    return r;
}
inline vec4d cmp_gt(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i)
        r.v[i] = detail::double_of(a.v[i] > b.v[i] ? detail::kAllOnes : 0);
    return r;
}
inline vec4d cmp_ge(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i)
        r.v[i] = detail::double_of(a.v[i] >= b.v[i] ? detail::kAllOnes : 0);
    return r;
}
inline vec4d cmp_lt(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i)
        r.v[i] = detail::double_of(a.v[i] < b.v[i] ? detail::kAllOnes : 0);
    return r;
}
inline vec4d blend(vec4d mask, vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i) {
        const uint64_t m = detail::bits_of(mask.v[i]);
        r.v[i] = detail::double_of((detail::bits_of(a.v[i]) & m) |
                                   (detail::bits_of(b.v[i]) & ~m));
    }
    return r;
}
inline vec4d vand(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i)
        r.v[i] = detail::double_of(detail::bits_of(a.v[i]) & detail::bits_of(b.v[i]));
    return r;
}
inline vec4d vor(vec4d a, vec4d b) {
    vec4d r;
    for (int i = 0; i < 4; ++i)
        r.v[i] = detail::double_of(detail::bits_of(a.v[i]) | detail::bits_of(b.v[i]));
    return r;
}
inline vec4d ldexp_fast(vec4d x, vec4d n) {
    vec4d r;
    for (int i = 0; i < 4; ++i) r.v[i] = std::ldexp(x.v[i], static_cast<int>(n.v[i]));
    return r;
}
inline void frexp_norm(vec4d x, vec4d& m, vec4d& e) {
    for (int i = 0; i < 4; ++i) {
        int ei = 0;
        m.v[i] = std::frexp(x.v[i], &ei);
        e.v[i] = ei;
    }
}

#endif

}  // namespace valet::kernels
