#include "simd/kernels_impl.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace torus_atlas::simd::detail {

namespace {
constexpr std::size_t kResync = 128;  // blocks of 2 between exact phase refreshes
}

double resonance_min_neon(double a, double b, long m0, long count, const double* w) {
    const float64x2_t va = vdupq_n_f64(a), vb = vdupq_n_f64(b), two = vdupq_n_f64(2.0);
    const double init[2] = {double(m0), double(m0 + 1)};
    float64x2_t mv = vld1q_f64(init);
    float64x2_t best = vdupq_n_f64(std::numeric_limits<double>::infinity());
    long t = 0;
    for (; t + 2 <= count; t += 2) {
        float64x2_t v = vabsq_f64(vfmaq_f64(vb, va, mv));
        best = vminq_f64(best, vmulq_f64(v, vld1q_f64(w + t)));
        mv = vaddq_f64(mv, two);
    }
    double out = vminvq_f64(best);
    for (; t < count; ++t) out = std::min(out, std::abs(std::fma(a, double(m0 + t), b)) * w[t]);
    return out;
}

void dft_moments_neon(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                      double dt, double* out) {
    float64x2_t s0r = vdupq_n_f64(0.0), s0i = s0r, s1r = s0r, s1i = s0r, s2r = s0r, s2i = s0r;
    const float64x2_t cr = vdupq_n_f64(std::cos(2.0 * nu * dt)), sr = vdupq_n_f64(std::sin(2.0 * nu * dt));
    float64x2_t c = s0r, s = s0r;
    std::size_t k = 0;
    for (std::size_t blk = 0; k + 2 <= n; k += 2, ++blk) {
        if (blk % kResync == 0) {
            double cc[2], ss[2];
            for (int l = 0; l < 2; ++l) {
                double t = t0 + double(k + l) * dt;
                cc[l] = std::cos(nu * t);
                ss[l] = std::sin(nu * t);
            }
            c = vld1q_f64(cc);
            s = vld1q_f64(ss);
        }
        const double tt[2] = {t0 + double(k) * dt, t0 + double(k + 1) * dt};
        float64x2_t t = vld1q_f64(tt);
        float64x2_t wv = vld1q_f64(w + k);
        float64x2_t xr = vmulq_f64(wv, vld1q_f64(re + k));
        float64x2_t xi = im ? vmulq_f64(wv, vld1q_f64(im + k)) : vdupq_n_f64(0.0);
        float64x2_t pr = vfmaq_f64(vmulq_f64(xi, s), xr, c);
        float64x2_t pi = vfmsq_f64(vmulq_f64(xi, c), xr, s);
        s0r = vaddq_f64(s0r, pr);
        s0i = vaddq_f64(s0i, pi);
        float64x2_t tpr = vmulq_f64(t, pr), tpi = vmulq_f64(t, pi);
        s1r = vaddq_f64(s1r, tpr);
        s1i = vaddq_f64(s1i, tpi);
        s2r = vfmaq_f64(s2r, t, tpr);
        s2i = vfmaq_f64(s2i, t, tpi);
        float64x2_t nc = vfmsq_f64(vmulq_f64(c, cr), s, sr);
        float64x2_t ns = vfmaq_f64(vmulq_f64(s, cr), c, sr);
        c = nc;
        s = ns;
    }
    double acc[6] = {vaddvq_f64(s0r), vaddvq_f64(s0i), vaddvq_f64(s1r),
                     vaddvq_f64(s1i), vaddvq_f64(s2r), vaddvq_f64(s2i)};
    if (k < n) {
        double tail[6];
        dft_moments_scalar(re + k, im ? im + k : nullptr, w + k, n - k, nu, t0 + double(k) * dt, dt, tail);
        for (int i = 0; i < 6; ++i) acc[i] += tail[i];
    }
    for (int i = 0; i < 6; ++i) out[i] = acc[i];
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double out = vmaxvq_f64(m);  // vmaxq propagates NaN
    double rest = max_abs_diff_scalar(a + i, b + i, n - i);
    if (std::isnan(out) || std::isnan(rest)) return std::numeric_limits<double>::quiet_NaN();
    return std::max(out, rest);
}

}  // namespace torus_atlas::simd::detail
