#pragma once

#include <complex>
#include <vector>

namespace torus_atlas {

using cplx = std::complex<double>;

// Signed wavenumber of FFT index i on a grid of n points.
inline int wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }

// Real n x n transforms in half-complex layout: n rows (k1) by n/2+1
// columns (k2 >= 0). backward() includes the 1/n^2 normalization.
class Fft2 {
public:
    explicit Fft2(int n);

    int n() const { return n_; }
    int cols() const { return n_ / 2 + 1; }
    std::size_t spectrum_size() const { return std::size_t(n_) * cols(); }

    void forward(const double* in, cplx* out) const;
    void backward(const cplx* in, double* out) const;

private:
    int n_;
    void* r2c_;
    void* c2r_;
};

// Unnormalized forward DFT of a complex sequence, any length.
void fft_forward(std::vector<cplx>& data);

}  // namespace torus_atlas
