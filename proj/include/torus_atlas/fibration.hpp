#pragma once

#include "torus_atlas/geometry.hpp"

#include <array>
#include <string>

namespace torus_atlas {

struct EMValue {
    double I = 0.0;
    double E = 0.0;
};

enum class ValueClass { Regular, BoundaryCurve, StableEquilibrium, FocusFocus, Exterior };

std::string to_string(ValueClass c);

inline constexpr double kClassifyTol = 1e-10;

EMValue em_map(const PhasePoint& x);
ValueClass classify(const EMValue& v, double tol = kClassifyTol);

// Lowest energy admissible at angular momentum I (relative equilibria).
double boundary_energy(double I);
// Height z* in (-1, 0] of the relative equilibrium with momentum I.
double boundary_height(double I);
// The boundary curve parameterized by z* in (-1, 0).
EMValue boundary_point(double z_star);

// f(z) = 2 (E - z)(1 - z^2) - I^2 = 2 (z - z1)(z - z2)(z - z3).
struct ReducedCubic {
    double I = 0.0, E = 0.0;
    std::array<double, 3> z{};
    // 1 + z1 and 1 - z2 carried separately; they are tiny near the poles.
    double gap_low = 0.0;
    double gap_high = 0.0;

    double operator()(double x) const { return 2.0 * (E - x) * (1.0 - x * x) - I * I; }
    double derivative(double x) const { return -2.0 * (1.0 - x * x) - 4.0 * x * (E - x); }
};

ReducedCubic reduced_roots(const EMValue& v);

}  // namespace torus_atlas
