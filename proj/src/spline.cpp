#include "torus_atlas/spline.hpp"

#include "torus_atlas/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace torus_atlas {

SplineWeights::SplineWeights(std::vector<double> x) : x_(std::move(x)) {
    const int n = int(x_.size());
    if (n < 2) throw ValidationError("spline needs at least two nodes");
    for (int k = 1; k < n; ++k)
        if (!(x_[k] > x_[k - 1])) throw ValidationError("spline nodes must increase");
    moments_ = Eigen::MatrixXd::Zero(n, n);
    if (n == 2) return;
    std::vector<double> h(n - 1);
    for (int k = 0; k + 1 < n; ++k) h[k] = x_[k + 1] - x_[k];
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), R = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i + 1 < n; ++i) {
        A(i, i - 1) = h[i - 1];
        A(i, i) = 2.0 * (h[i - 1] + h[i]);
        A(i, i + 1) = h[i];
        R(i, i + 1) = 6.0 / h[i];
        R(i, i) = -6.0 / h[i] - 6.0 / h[i - 1];
        R(i, i - 1) = 6.0 / h[i - 1];
    }
    if (n == 3) {
        // single parabola: constant second derivative
        A(0, 0) = 1.0;
        A(0, 1) = -1.0;
        A(2, 1) = -1.0;
        A(2, 2) = 1.0;
    } else {
        // continuous third derivative at x_1 and x_{n-2}
        A(0, 0) = -1.0 / h[0];
        A(0, 1) = 1.0 / h[0] + 1.0 / h[1];
        A(0, 2) = -1.0 / h[1];
        A(n - 1, n - 3) = -1.0 / h[n - 3];
        A(n - 1, n - 2) = 1.0 / h[n - 3] + 1.0 / h[n - 2];
        A(n - 1, n - 1) = -1.0 / h[n - 2];
    }
    moments_ = A.partialPivLu().solve(R);
}

std::vector<double> SplineWeights::weights(double t) const {
    const int n = int(x_.size());
    int k = int(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    k = std::clamp(k, 0, n - 2);
    double h = x_[k + 1] - x_[k];
    double b = (t - x_[k]) / h, a = 1.0 - b;
    std::vector<double> w(n, 0.0);
    w[k] += a;
    w[k + 1] += b;
    double ca = (a * a * a - a) * h * h / 6.0, cb = (b * b * b - b) * h * h / 6.0;
    for (int j = 0; j < n; ++j) w[j] += ca * moments_(k, j) + cb * moments_(k + 1, j);
    return w;
}

double SplineWeights::interpolate(const std::vector<double>& y, double t) const {
    if (y.size() != x_.size()) throw ValidationError("spline data size mismatch");
    std::vector<double> w = weights(t);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += w[k] * y[k];
    return s;
}

}  // namespace torus_atlas
