#include "simd/kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace torus_atlas::simd::detail {

namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    return std::min(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

constexpr std::size_t kResync = 64;  // blocks of 4 between exact phase refreshes

}  // namespace

double resonance_min_avx2(double a, double b, long m0, long count, const double* w) {
    const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
    const __m256d sign = _mm256_set1_pd(-0.0), four = _mm256_set1_pd(4.0);
    __m256d mv = _mm256_setr_pd(double(m0), double(m0 + 1), double(m0 + 2), double(m0 + 3));
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    long t = 0;
    for (; t + 4 <= count; t += 4) {
        __m256d v = _mm256_andnot_pd(sign, _mm256_fmadd_pd(va, mv, vb));
        best = _mm256_min_pd(best, _mm256_mul_pd(v, _mm256_loadu_pd(w + t)));
        mv = _mm256_add_pd(mv, four);
    }
    double out = hmin(best);
    for (; t < count; ++t) out = std::min(out, std::abs(std::fma(a, double(m0 + t), b)) * w[t]);
    return out;
}

void dft_moments_avx2(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                      double dt, double* out) {
    __m256d s0r = _mm256_setzero_pd(), s0i = s0r, s1r = s0r, s1i = s0r, s2r = s0r, s2i = s0r;
    const __m256d cr = _mm256_set1_pd(std::cos(4.0 * nu * dt)), sr = _mm256_set1_pd(std::sin(4.0 * nu * dt));
    const __m256d vdt = _mm256_set1_pd(dt), vt0 = _mm256_set1_pd(t0);
    const __m256d lane = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d c = _mm256_setzero_pd(), s = c;
    std::size_t k = 0;
    for (std::size_t blk = 0; k + 4 <= n; k += 4, ++blk) {
        if (blk % kResync == 0) {
            alignas(32) double cc[4], ss[4];
            for (int l = 0; l < 4; ++l) {
                double t = t0 + double(k + l) * dt;
                cc[l] = std::cos(nu * t);
                ss[l] = std::sin(nu * t);
            }
            c = _mm256_load_pd(cc);
            s = _mm256_load_pd(ss);
        }
        __m256d t = _mm256_add_pd(vt0, _mm256_mul_pd(_mm256_add_pd(_mm256_set1_pd(double(k)), lane), vdt));
        __m256d wv = _mm256_loadu_pd(w + k);
        __m256d xr = _mm256_mul_pd(wv, _mm256_loadu_pd(re + k));
        __m256d xi = im ? _mm256_mul_pd(wv, _mm256_loadu_pd(im + k)) : _mm256_setzero_pd();
        __m256d pr = _mm256_fmadd_pd(xr, c, _mm256_mul_pd(xi, s));
        __m256d pi = _mm256_fmsub_pd(xi, c, _mm256_mul_pd(xr, s));
        s0r = _mm256_add_pd(s0r, pr);
        s0i = _mm256_add_pd(s0i, pi);
        __m256d tpr = _mm256_mul_pd(t, pr), tpi = _mm256_mul_pd(t, pi);
        s1r = _mm256_add_pd(s1r, tpr);
        s1i = _mm256_add_pd(s1i, tpi);
        s2r = _mm256_fmadd_pd(t, tpr, s2r);
        s2i = _mm256_fmadd_pd(t, tpi, s2i);
        // advance the phase e^{-i nu t} by 4 dt
        __m256d nc = _mm256_fmsub_pd(c, cr, _mm256_mul_pd(s, sr));
        __m256d ns = _mm256_fmadd_pd(s, cr, _mm256_mul_pd(c, sr));
        c = nc;
        s = ns;
    }
    double acc[6] = {hsum(s0r), hsum(s0i), hsum(s1r), hsum(s1i), hsum(s2r), hsum(s2i)};
    if (k < n) {
        double tail[6];
        dft_moments_scalar(re + k, im ? im + k : nullptr, w + k, n - k, nu, t0 + double(k) * dt, dt, tail);
        for (int i = 0; i < 6; ++i) acc[i] += tail[i];
    }
    for (int i = 0; i < 6; ++i) out[i] = acc[i];
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd(), bad = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, d);
    }
    if (_mm256_movemask_pd(bad) != 0) return std::numeric_limits<double>::quiet_NaN();
    double out = hmax(m);
    double rest = max_abs_diff_scalar(a + i, b + i, n - i);
    if (std::isnan(rest)) return rest;
    return std::max(out, rest);
}

}  // namespace torus_atlas::simd::detail
