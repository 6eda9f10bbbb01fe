#pragma once

#include "torus_atlas/action_angle.hpp"
#include "torus_atlas/fourier.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace torus_atlas {

using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// A map T^2 -> R^6 sampled on the n x n grid theta = 2 pi (i, j) / n, column
// i*n + j of values(). Spectra of the six components are kept alongside.
class TorusEmbedding {
public:
    TorusEmbedding() = default;
    TorusEmbedding(int n, const FrequencyVector& omega, Matrix6X values);

    int n() const { return n_; }
    const FrequencyVector& omega() const { return omega_; }
    const Matrix6X& values() const { return values_; }
    Vec6 sample(int i, int j) const { return values_.col(std::size_t(i) * n_ + j); }
    const std::vector<cplx>& spectrum(int comp) const { return spectra_[comp]; }

    // Trigonometric interpolant; the Nyquist row and column are not used.
    Vec6 evaluate(const AnglePair& a) const;
    void evaluate(const AnglePair& a, Vec6* x, Vec6* d1, Vec6* d2) const;

    double max_constraint_defect() const;
    // Largest coefficient with max(|k1|, |k2|) >= band relative to the largest one.
    double tail_ratio(int band) const;

    // Angle translation applied by the last gauge normalization.
    AnglePair phase_offset;

private:
    int n_ = 0;
    FrequencyVector omega_;
    Matrix6X values_;
    std::array<std::vector<cplx>, 6> spectra_;
};

// Integrable torus of the regular value v on an n x n grid, phase origin at
// the z1 turning point and azimuth 0. Throws GridTooCoarse when the
// invariance residual exceeds 1e-8.
TorusEmbedding integrable_embedding(const EMValue& v, int n);

// theta -> K(theta + c), by phase rotation of the coefficients.
TorusEmbedding translate_on_torus(const TorusEmbedding& K, const AnglePair& c);

// Angle of the point of K nearest to x, by Gauss-Newton from the guess.
AnglePair locate_on_torus(const TorusEmbedding& K, const Vec6& x, AnglePair guess, double* distance = nullptr);

}  // namespace torus_atlas
