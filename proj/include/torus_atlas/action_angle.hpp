#pragma once

#include "torus_atlas/fibration.hpp"

#include <Eigen/Core>

#include <vector>

namespace torus_atlas {

struct ActionPair {
    double I = 0.0;
    double J = 0.0;
};

struct FrequencyVector {
    double omega1 = 0.0;  // conjugate to J, the z-oscillation
    double omega2 = 0.0;  // conjugate to I, the azimuth
};

struct AnglePair {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

struct Periods {
    double T = 0.0;
    // Rotation angle from the signed integral; odd in I. On the axis I = 0
    // this holds the I -> 0+ limit (pi below the focus-focus value, 2 pi above).
    double theta = 0.0;
    // theta reduced to (0, 2 pi]; the chart convention.
    double theta_principal = 0.0;
    // One-sided limits on the axis; equal to theta off the axis.
    double theta_axis_plus = 0.0;
    double theta_axis_minus = 0.0;
};

double action_J(const EMValue& v);
Periods periods(const EMValue& v);
FrequencyVector frequency_map(const EMValue& v);
inline ActionPair actions(const EMValue& v) { return {v.I, action_J(v)}; }

// Quadratures along one regular fiber, with the sin^2 substitution
// z = z1 + (z2 - z1) sin^2 s. Cheap to copy; holds the roots and periods.
class FiberQuadrature {
public:
    explicit FiberQuadrature(const EMValue& v);

    const ReducedCubic& cubic() const { return cubic_; }
    const Periods& periods() const { return periods_; }
    FrequencyVector frequencies() const;

    double z_of(double s) const;
    // Time and azimuth advance from the z1 turning point to parameter s.
    double time_to(double s) const;
    double azimuth_to(double s) const;
    double s_of_time(double t) const;  // inverse of time_to on [0, T/2]

private:
    double inv_speed(double s) const;
    double azimuth_density(double s) const;  // remainder after the pole terms

    ReducedCubic cubic_;
    Periods periods_;
    double delta_ = 0.0;
};

// Angles of a point in the standard chart: theta1 = omega1 t with t measured
// from the z1 turning point, theta2 = phi - (phi(t) - omega2 t). Both in [0, 2 pi).
AnglePair standard_angles(const PhasePoint& x);
AnglePair standard_angles(const PhasePoint& x, const FiberQuadrature& fq);
// Inverse chart: the point of the fiber v with the given angles.
PhasePoint chart_point(const FiberQuadrature& fq, const AnglePair& a);
PhasePoint chart_point(const EMValue& v, const AnglePair& a);

struct ValueWindow {
    double I0 = 0.0, I1 = 0.0, E0 = 0.0, E1 = 0.0;

    bool contains(const EMValue& v) const { return v.I >= I0 && v.I <= I1 && v.E >= E0 && v.E <= E1; }
    EMValue at(double u, double w) const { return {I0 + u * (I1 - I0), E0 + w * (E1 - E0)}; }
};

struct ChartSpec {
    int id = 0;
    ValueWindow window;
    double gamma = 1e-3;
    // Symmetric gauge G of this chart's angles: alpha = alpha_std + G (J, I).
    Eigen::Matrix2d gauge = Eigen::Matrix2d::Zero();
};

// alpha^j(x) for a chart with the given gauge.
AnglePair chart_angles(const PhasePoint& x, const ChartSpec& chart);

// Every point on a regular grid (and along the window edges) must be Regular.
void validate_chart(const ChartSpec& chart);

struct FreqMapRow {
    double I = 0, E = 0, J = 0, T = 0, Theta = 0, omega1 = 0, omega2 = 0, detJac = 0;
};

// d(omega1, omega2)/d(I, J) at v by central differences of frequency_map
// in (I, E) and the exact change of variables dJ/dE = T/2pi, dJ/dI = -Theta/2pi.
Eigen::Matrix2d frequency_jacobian(const EMValue& v, double h = 1e-4);

struct NondegeneracyReport {
    double min_abs_det = 0.0;
    EMValue argmin;
    double max_abs_det = 0.0;
    std::vector<FreqMapRow> rows;  // I-major, Regular nodes only
    std::size_t skipped = 0;        // nodes whose stencil leaves the Regular set
};

// Grid points include the window corners; n along I, m along E. Nodes that
// are not Regular (stencil included) raise DomainError unless skipped.
NondegeneracyReport nondegeneracy_scan(const ValueWindow& region, int n, int m, double h = 1e-4, int jobs = 0,
                                       bool skip_nonregular = false);

}  // namespace torus_atlas
