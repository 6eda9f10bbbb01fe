#pragma once

#include <functional>

namespace torus_atlas {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Bisects the interval with
// the largest error estimate until the summed estimate meets the target.
// Throws QuadratureError when max_intervals is exhausted.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol = 0.0, int max_intervals = 2000);

}  // namespace torus_atlas
