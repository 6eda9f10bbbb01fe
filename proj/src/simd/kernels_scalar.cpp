#include "simd/kernels_impl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace torus_atlas::simd::detail {

double resonance_min_scalar(double a, double b, long m0, long count, const double* w) {
    double best = std::numeric_limits<double>::infinity();
    for (long t = 0; t < count; ++t) {
        double v = std::abs(std::fma(a, double(m0 + t), b)) * w[t];
        best = std::min(best, v);
    }
    return best;
}

// Reference version: every phase factor from sin/cos directly.
void dft_moments_scalar(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                        double dt, double* out) {
    double s0r = 0, s0i = 0, s1r = 0, s1i = 0, s2r = 0, s2i = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double t = t0 + double(k) * dt;
        double c = std::cos(nu * t), s = std::sin(nu * t);
        double xr = w[k] * re[k];
        double xi = im ? w[k] * im[k] : 0.0;
        // (xr + i xi)(c - i s)
        double pr = xr * c + xi * s;
        double pi = xi * c - xr * s;
        s0r += pr;
        s0i += pi;
        s1r += t * pr;
        s1i += t * pi;
        s2r += t * t * pr;
        s2i += t * t * pi;
    }
    out[0] = s0r;
    out[1] = s0i;
    out[2] = s1r;
    out[3] = s1i;
    out[4] = s2r;
    out[5] = s2i;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::abs(a[i] - b[i]);
        if (std::isnan(d)) return std::numeric_limits<double>::quiet_NaN();
        m = std::max(m, d);
    }
    return m;
}

}  // namespace torus_atlas::simd::detail
