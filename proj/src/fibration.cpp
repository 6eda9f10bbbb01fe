#include "torus_atlas/fibration.hpp"

#include "torus_atlas/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace torus_atlas {

std::string to_string(ValueClass c) {
    switch (c) {
    case ValueClass::Regular: return "Regular";
    case ValueClass::BoundaryCurve: return "BoundaryCurve";
    case ValueClass::StableEquilibrium: return "StableEquilibrium";
    case ValueClass::FocusFocus: return "FocusFocus";
    case ValueClass::Exterior: return "Exterior";
    }
    return "?";
}

EMValue em_map(const PhasePoint& x) {
    require_valid(x);
    return {x.q[0] * x.p[1] - x.q[1] * x.p[0], hamiltonian(x)};
}

namespace {

// delta = 1 + z* of the relative equilibrium, solving
// (delta (2 - delta))^2 = (1 - delta) I^2 on (0, 1].
double boundary_delta(double I) {
    double I2 = I * I;
    if (I2 == 0.0) return 0.0;
    auto g = [I2](double d) {
        double s = d * (2.0 - d);
        return s * s + (d - 1.0) * I2;
    };
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(g, 0.0, 1.0, -I2, 1.0,
                                               boost::math::tools::eps_tolerance<double>(53), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

double boundary_height(double I) { return boundary_delta(I) - 1.0; }

double boundary_energy(double I) {
    double d = boundary_delta(I);
    if (d == 0.0) return -1.0;
    return I * I / (2.0 * d * (2.0 - d)) + d - 1.0;
}

EMValue boundary_point(double z_star) {
    if (!(z_star > -1.0 && z_star < 0.0)) throw DomainError("boundary parameter must lie in (-1, 0)");
    double w = 1.0 - z_star * z_star;
    double I2 = -w * w / z_star;
    return {std::sqrt(I2), I2 / (2.0 * w) + z_star};
}

ValueClass classify(const EMValue& v, double tol) {
    if (!std::isfinite(v.I) || !std::isfinite(v.E)) return ValueClass::Exterior;
    if (std::hypot(v.I, v.E - 1.0) <= tol) return ValueClass::FocusFocus;
    if (std::hypot(v.I, v.E + 1.0) <= tol) return ValueClass::StableEquilibrium;
    double emin = boundary_energy(v.I);
    if (v.E < emin - tol) return ValueClass::Exterior;
    if (v.E <= emin + tol) return ValueClass::BoundaryCurve;
    return ValueClass::Regular;
}

namespace {

// Newton on phi(d) = 2 (c - d) d (2 - d) - I^2, which is f(-1 + d) (c = E + 1)
// or, with c = 1 - E and a sign flip, f(1 - d).
double polish_gap(double d, double c, double I2, double sign) {
    for (int it = 0; it < 4; ++it) {
        double phi = sign * 2.0 * (c - d) * d * (2.0 - d) - I2;
        double dphi = sign * 2.0 * (-d * (2.0 - d) + (c - d) * (2.0 - 2.0 * d));
        if (dphi == 0.0) break;
        double nd = d - phi / dphi;
        if (!std::isfinite(nd) || nd < 0.0) break;
        d = nd;
    }
    return d;
}

}  // namespace

ReducedCubic reduced_roots(const EMValue& v) {
    ValueClass c = classify(v);
    if (c != ValueClass::Regular)
        throw DomainError(fmt::format("value ({:.17g}, {:.17g}) is {}, not Regular", v.I, v.E, to_string(c)));
    ReducedCubic rc;
    rc.I = v.I;
    rc.E = v.E;
    const double I2 = v.I * v.I;
    if (I2 == 0.0) {
        if (v.E < 1.0) {
            rc.z = {-1.0, v.E, 1.0};
            rc.gap_high = 1.0 - v.E;
        } else {
            rc.z = {-1.0, 1.0, v.E};
            rc.gap_high = 0.0;
        }
        rc.gap_low = 0.0;
        return rc;
    }
    // z^3 - E z^2 - z + (E - I^2/2) = 0 by the trigonometric method.
    const double a = -v.E;
    const double Q = (a * a + 3.0) / 9.0;
    const double R = (2.0 * a * a * a + 9.0 * a + 27.0 * (v.E - 0.5 * I2)) / 54.0;
    double ratio = std::clamp(R / std::sqrt(Q * Q * Q), -1.0, 1.0);
    double th = std::acos(ratio);
    const double sq = -2.0 * std::sqrt(Q);
    for (int k = 0; k < 3; ++k)
        rc.z[k] = sq * std::cos((th + 2.0 * std::numbers::pi * k) / 3.0) - a / 3.0;
    std::sort(rc.z.begin(), rc.z.end());
    for (double& z : rc.z) {
        double d = rc.derivative(z);
        if (d != 0.0) z -= rc(z) / d;
    }
    std::sort(rc.z.begin(), rc.z.end());
    rc.gap_low = polish_gap(std::max(0.0, 1.0 + rc.z[0]), v.E + 1.0, I2, 1.0);
    // f(1 - d) = 2 (E - 1 + d) d (2 - d) - I^2 = -2 ((1 - E) - d) d (2 - d) - I^2.
    rc.gap_high = polish_gap(std::max(0.0, 1.0 - rc.z[1]), 1.0 - v.E, I2, -1.0);
    return rc;
}

}  // namespace torus_atlas
