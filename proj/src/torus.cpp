#include "torus_atlas/torus.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/kam.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TorusEmbedding::TorusEmbedding(int n, const FrequencyVector& omega, Matrix6X values)
    : n_(n), omega_(omega), values_(std::move(values)) {
    if (values_.cols() != Eigen::Index(n) * n) throw std::invalid_argument("torus grid has the wrong size");
    Fft2 fft(n);
    std::vector<double> buf(std::size_t(n) * n);
    for (int c = 0; c < 6; ++c) {
        for (Eigen::Index k = 0; k < values_.cols(); ++k) buf[k] = values_(c, k);
        spectra_[c].resize(fft.spectrum_size());
        fft.forward(buf.data(), spectra_[c].data());
    }
}

void TorusEmbedding::evaluate(const AnglePair& a, Vec6* x, Vec6* d1, Vec6* d2) const {
    const int n = n_, nc = n / 2 + 1, half = n / 2;
    std::vector<cplx> e1(n), e2(nc);
    for (int i = 0; i < n; ++i) e1[i] = std::polar(1.0, wavenumber(i, n) * a.theta1);
    for (int j = 0; j < half; ++j) e2[j] = std::polar(j == 0 ? 1.0 : 2.0, j * a.theta2);
    const double norm = 1.0 / (double(n) * n);
    for (int c = 0; c < 6; ++c) {
        const cplx* s = spectra_[c].data();
        cplx v(0.0), g1(0.0), g2(0.0);
        for (int i = 0; i < n; ++i) {
            if (i == half) continue;
            const cplx* row = s + std::size_t(i) * nc;
            cplx inner(0.0), inner_k2(0.0);
            for (int j = 0; j < half; ++j) {
                cplx t = row[j] * e2[j];
                inner += t;
                inner_k2 += double(j) * t;
            }
            cplx r = e1[i] * inner;
            v += r;
            g1 += double(wavenumber(i, n)) * r;
            g2 += e1[i] * inner_k2;
        }
        if (x) (*x)[c] = v.real() * norm;
        // d/dtheta of Re(c e^{i k theta}) = Re(i k c e^{i k theta}) = -k Im(...)
        if (d1) (*d1)[c] = -g1.imag() * norm;
        if (d2) (*d2)[c] = -g2.imag() * norm;
    }
}

Vec6 TorusEmbedding::evaluate(const AnglePair& a) const {
    Vec6 x;
    evaluate(a, &x, nullptr, nullptr);
    return x;
}

double TorusEmbedding::max_constraint_defect() const {
    double d = 0.0;
    for (Eigen::Index k = 0; k < values_.cols(); ++k)
        d = std::max(d, constraint_defect(PhasePoint::from_vec(values_.col(k))));
    return d;
}

double TorusEmbedding::tail_ratio(int band) const {
    const int n = n_, nc = n / 2 + 1;
    double top = 0.0, tail = 0.0;
    for (int c = 0; c < 6; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < nc; ++j) {
                double m = std::abs(spectra_[c][std::size_t(i) * nc + j]);
                top = std::max(top, m);
                if (std::max(std::abs(wavenumber(i, n)), j) >= band) tail = std::max(tail, m);
            }
    return top > 0.0 ? tail / top : 0.0;
}

TorusEmbedding integrable_embedding(const EMValue& v, int n) {
    if (n < 32 || (n & (n - 1)) != 0) throw ValidationError("torus grid order must be a power of 2, at least 32");
    FiberQuadrature fq(v);
    Matrix6X vals(6, Eigen::Index(n) * n);
    for (int i = 0; i < n; ++i) {
        PhasePoint base = chart_point(fq, {kTwoPi * i / n, 0.0});
        for (int j = 0; j < n; ++j) {
            double c = std::cos(kTwoPi * j / n), s = std::sin(kTwoPi * j / n);
            Vec6 x;
            x << c * base.q[0] - s * base.q[1], s * base.q[0] + c * base.q[1], base.q[2],
                c * base.p[0] - s * base.p[1], s * base.p[0] + c * base.p[1], base.p[2];
            vals.col(Eigen::Index(i) * n + j) = x;
        }
    }
    TorusEmbedding K(n, fq.frequencies(), std::move(vals));
    double r = invariance_residual(K, K.omega(), HamiltonianSpec{});
    if (r > 1e-8)
        throw GridTooCoarse(fmt::format("integrable embedding residual {:.3e} at N = {}; try N = {}", r, n, 2 * n),
                            2 * n);
    return K;
}

TorusEmbedding translate_on_torus(const TorusEmbedding& K, const AnglePair& c) {
    const int n = K.n(), nc = n / 2 + 1;
    Fft2 fft(n);
    Matrix6X vals(6, Eigen::Index(n) * n);
    std::vector<cplx> s(fft.spectrum_size());
    std::vector<double> out(std::size_t(n) * n);
    for (int comp = 0; comp < 6; ++comp) {
        const std::vector<cplx>& src = K.spectrum(comp);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < nc; ++j) {
                std::size_t k = std::size_t(i) * nc + j;
                if (i == n / 2 || j == n / 2) {
                    s[k] = 0.0;  // a shifted Nyquist mode is not representable on the grid
                    continue;
                }
                s[k] = src[k] * std::polar(1.0, wavenumber(i, n) * c.theta1 + j * c.theta2);
            }
        fft.backward(s.data(), out.data());
        for (std::size_t k = 0; k < out.size(); ++k) vals(comp, Eigen::Index(k)) = out[k];
    }
    TorusEmbedding T(n, K.omega(), std::move(vals));
    T.phase_offset = {K.phase_offset.theta1 + c.theta1, K.phase_offset.theta2 + c.theta2};
    return T;
}

AnglePair locate_on_torus(const TorusEmbedding& K, const Vec6& x, AnglePair a, double* distance) {
    Vec6 y, d1, d2;
    for (int it = 0; it < 40; ++it) {
        K.evaluate(a, &y, &d1, &d2);
        Eigen::Matrix<double, 6, 2> D;
        D << d1, d2;
        Eigen::Vector2d step = (D.transpose() * D).ldlt().solve(-D.transpose() * (y - x));
        a.theta1 += step[0];
        a.theta2 += step[1];
        if (step.lpNorm<Eigen::Infinity>() < 1e-14) break;
    }
    if (distance) *distance = (K.evaluate(a) - x).norm();
    return a;
}

}  // namespace torus_atlas
