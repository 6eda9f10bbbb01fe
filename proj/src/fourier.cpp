#include "torus_atlas/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace torus_atlas {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex g_plan_mutex;

struct Plans2 {
    fftw_plan r2c;
    fftw_plan c2r;
};

Plans2 plans_for(int n) {
    static std::map<int, Plans2> cache;
    std::lock_guard<std::mutex> lk(g_plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const std::size_t nc = std::size_t(n) * (n / 2 + 1);
    double* r = fftw_alloc_real(std::size_t(n) * n);
    fftw_complex* c = fftw_alloc_complex(nc);
    Plans2 p;
    p.r2c = fftw_plan_dft_r2c_2d(n, n, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(r);
    fftw_free(c);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    cache.emplace(n, p);
    return p;
}

fftw_plan plan_1d(int n) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lk(g_plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(n, a, a, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    if (!p) throw std::runtime_error("FFTW planning failed");
    cache.emplace(n, p);
    return p;
}

}  // namespace

Fft2::Fft2(int n) : n_(n) {
    if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument("Fourier grid order must be a power of 2");
    Plans2 p = plans_for(n);
    r2c_ = p.r2c;
    c2r_ = p.c2r;
}

void Fft2::forward(const double* in, cplx* out) const {
    // r2c does not modify its input
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void Fft2::backward(const cplx* in, double* out) const {
    std::vector<cplx> tmp(in, in + spectrum_size());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(tmp.data()), out);
    const double s = 1.0 / (double(n_) * n_);
    for (std::size_t i = 0, m = std::size_t(n_) * n_; i < m; ++i) out[i] *= s;
}

void fft_forward(std::vector<cplx>& data) {
    if (data.empty()) return;
    fftw_plan p = plan_1d(int(data.size()));
    auto* d = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, d, d);
}

}  // namespace torus_atlas
