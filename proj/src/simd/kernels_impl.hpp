#pragma once

#include "torus_atlas/simd/kernels.hpp"

namespace torus_atlas::simd::detail {

double resonance_min_scalar(double a, double b, long m0, long count, const double* w);
void dft_moments_scalar(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                        double dt, double* out);
double max_abs_diff_scalar(const double* a, const double* b, std::size_t n);

#if defined(TA_HAVE_AVX2)
double resonance_min_avx2(double a, double b, long m0, long count, const double* w);
void dft_moments_avx2(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                      double dt, double* out);
double max_abs_diff_avx2(const double* a, const double* b, std::size_t n);
#endif

#if defined(TA_HAVE_NEON)
double resonance_min_neon(double a, double b, long m0, long count, const double* w);
void dft_moments_neon(const double* re, const double* im, const double* w, std::size_t n, double nu, double t0,
                      double dt, double* out);
double max_abs_diff_neon(const double* a, const double* b, std::size_t n);
#endif

}  // namespace torus_atlas::simd::detail
