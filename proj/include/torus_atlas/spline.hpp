#pragma once

#include <Eigen/Core>

#include <vector>

namespace torus_atlas {

// Not-a-knot cubic spline through (x_k, y_k) written as a linear functional
// of y: s(t) = sum_k w_k(t) y_k. Two nodes give the line, three the parabola.
class SplineWeights {
public:
    explicit SplineWeights(std::vector<double> x);

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& nodes() const { return x_; }
    // Outside [x_0, x_{n-1}] the end cubics are extended.
    std::vector<double> weights(double t) const;
    double interpolate(const std::vector<double>& y, double t) const;

private:
    std::vector<double> x_;
    Eigen::MatrixXd moments_;  // y -> second derivatives at the nodes
};

}  // namespace torus_atlas
