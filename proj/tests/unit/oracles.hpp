#pragma once

// Reference values computed without the library's quadrature, root finder or
// Diophantine scan. Kept deliberately naive.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.141592653589793;

// Real roots of z^3 - E z^2 - z + (E - I^2/2), sorted, by bisection on the
// brackets [-1, c], [c, 1], [1, big] around the local maximum c.
inline std::vector<double> cubic_roots(double I, double E) {
    auto f = [&](double z) { return 2.0 * (E - z) * (1.0 - z * z) - I * I; };
    double disc = std::sqrt(E * E + 3.0);
    double c1 = (E - disc) / 3.0;  // local maximum of f, between z1 and z2
    auto bisect = [&](double a, double b) {
        double fa = f(a);
        for (int k = 0; k < 200; ++k) {
            double m = 0.5 * (a + b);
            double fm = f(m);
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };
    return {bisect(-1.0, c1), bisect(c1, 1.0), bisect(1.0, 1.0 + std::abs(E) + 2.0 + I * I)};
}

struct Fiber {
    double T, Theta, J;
};

// Midpoint rule in s with z = z1 + (z2 - z1) sin^2 s; the integrands are
// smooth and even about both ends, so the rule converges geometrically.
inline Fiber fiber_integrals(double I, double E, int n = 20000) {
    auto r = cubic_roots(I, E);
    double z1 = r[0], z2 = r[1], z3 = r[2], D = z2 - z1;
    double T = 0, Th = 0, J = 0;
    double hs = (kPi / 2) / n;
    for (int k = 0; k < n; ++k) {
        double s = (k + 0.5) * hs;
        double sn = std::sin(s), cs = std::cos(s);
        double z = z1 + D * sn * sn;
        double g = std::sqrt(2.0 * (z3 - z));
        T += 4.0 / g;
        Th += 4.0 * I / ((1.0 - z * z) * g);
        J += 2.0 * D * D * sn * sn * cs * cs * g / (1.0 - z * z);
    }
    return {T * hs, Th * hs, J * hs / kPi};
}

inline double agm(double a, double b) {
    for (int k = 0; k < 60; ++k) {
        double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return a;
}

// Planar pendulum with amplitude theta0: full period 2 pi / agm(1, cos(theta0/2)).
// The height oscillates twice per swing.
inline double planar_height_period(double E) {
    double theta0 = std::acos(-E);
    return kPi / agm(1.0, std::cos(theta0 / 2));
}

// Direct double loop over 0 < |k|_inf <= k_max, weight |k|_1^tau.
inline double diophantine_margin(double w1, double w2, double gamma, double tau, int k_max) {
    double best = 1e300;
    for (int k1 = -k_max; k1 <= k_max; ++k1)
        for (int k2 = -k_max; k2 <= k_max; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            double v = std::abs(k1 * w1 + k2 * w2) * std::pow(std::abs(k1) + std::abs(k2), tau);
            best = std::min(best, v);
        }
    return best - gamma;
}

// Plain DFT peak with golden-section refinement of |S(nu)|.
inline double dft_peak(const std::vector<double>& x, double dt, double lo, double hi) {
    auto mag = [&](double nu) {
        std::complex<double> s = 0;
        const std::size_t n = x.size();
        for (std::size_t k = 0; k < n; ++k) {
            double w = 0.5 - 0.5 * std::cos(2 * kPi * double(k) / double(n));
            s += w * x[k] * std::polar(1.0, -nu * dt * double(k));
        }
        return std::abs(s);
    };
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    for (int k = 0; k < 100; ++k) {
        double c = b - g * (b - a), d = a + g * (b - a);
        if (mag(c) > mag(d))
            b = d;
        else
            a = c;
    }
    return 0.5 * (a + b);
}

}  // namespace oracle
