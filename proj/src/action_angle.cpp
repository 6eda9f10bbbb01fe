#include "torus_atlas/action_angle.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"
#include "torus_atlas/quadrature.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAbsTol = 1e-15;
constexpr double kRelTol = 1e-14;

double wrap_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

}  // namespace

FiberQuadrature::FiberQuadrature(const EMValue& v) : cubic_(reduced_roots(v)) {
    delta_ = (1.0 - cubic_.gap_high) - (cubic_.gap_low - 1.0);
    periods_.T = 2.0 * time_to(0.5 * kPi);
    if (v.I == 0.0) {
        double lim = v.E < 1.0 ? kPi : kTwoPi;
        periods_.theta = lim;
        periods_.theta_axis_plus = lim;
        periods_.theta_axis_minus = -lim;
    } else {
        periods_.theta = 2.0 * azimuth_to(0.5 * kPi);
        periods_.theta_axis_plus = periods_.theta;
        periods_.theta_axis_minus = periods_.theta;
    }
    double p = std::fmod(periods_.theta, kTwoPi);
    if (p <= 0.0) p += kTwoPi;
    periods_.theta_principal = p;
}

FrequencyVector FiberQuadrature::frequencies() const {
    return {kTwoPi / periods_.T, periods_.theta_principal / periods_.T};
}

double FiberQuadrature::z_of(double s) const {
    double sn = std::sin(s);
    return cubic_.z[0] + delta_ * sn * sn;
}

double FiberQuadrature::inv_speed(double s) const {
    double c = std::cos(s);
    double gap3 = (cubic_.z[2] - cubic_.z[1]) + delta_ * c * c;
    return 2.0 / std::sqrt(2.0 * gap3);
}

// The azimuth density is I h(s) (1/(1+z) + 1/(1-z)) with h = 1/sqrt(2(z3-z)).
// Both pole terms are integrated in closed form with h frozen at the pole; this
// leaves a bounded remainder even when 1 +- z nearly vanishes (|I| tiny).
double FiberQuadrature::azimuth_density(double s) const {
    double sn = std::sin(s), c = std::cos(s);
    double s2 = sn * sn, c2 = c * c;
    double w = cubic_.z[2] - cubic_.z[1];
    double u2 = std::sqrt(2.0 * (w + delta_ * c2));
    double v2 = std::sqrt(2.0 * (w + delta_));  // at s = 0
    double w2 = std::sqrt(2.0 * w);             // at s = pi / 2
    double low = 2.0 * delta_ * s2 / (u2 * v2 * (u2 + v2) * (cubic_.gap_low + delta_ * s2));
    double high = 2.0 * delta_ * c2 / (u2 * w2 * (u2 + w2) * (cubic_.gap_high + delta_ * c2));
    return cubic_.I * (low - high);
}

namespace {

// int_0^s dx / (a + d sin^2 x)
double pole_integral(double a, double d, double s) {
    return std::atan2(std::sqrt(a + d) * std::sin(s), std::sqrt(a) * std::cos(s)) / std::sqrt(a * (a + d));
}

}  // namespace

double FiberQuadrature::azimuth_to(double s) const {
    if (s == 0.0 || cubic_.I == 0.0) return 0.0;
    const double w = cubic_.z[2] - cubic_.z[1];
    const double h0 = 1.0 / std::sqrt(2.0 * (w + delta_)), h1 = 1.0 / std::sqrt(2.0 * w);
    const double a = cubic_.gap_low, b = cubic_.gap_high;
    double closed = h0 * pole_integral(a, delta_, s) +
                    h1 * (pole_integral(b, delta_, 0.5 * kPi) - pole_integral(b, delta_, 0.5 * kPi - s));
    double rest = integrate_gk([this](double x) { return azimuth_density(x); }, 0.0, s, kAbsTol, kRelTol).value;
    return cubic_.I * closed + rest;
}

double FiberQuadrature::time_to(double s) const {
    if (s == 0.0) return 0.0;
    return integrate_gk([this](double x) { return inv_speed(x); }, 0.0, s, kAbsTol, kRelTol).value;
}


double FiberQuadrature::s_of_time(double t) const {
    const double half = 0.5 * periods_.T;
    if (t <= 0.0) return 0.0;
    if (t >= half) return 0.5 * kPi;
    double lo = 0.0, hi = 0.5 * kPi;
    double s = t / half * 0.5 * kPi;
    double ts = time_to(s);
    for (int it = 0; it < 60; ++it) {
        double g = ts - t;
        if (g > 0.0) hi = s;
        else lo = s;
        double ns = s - g / inv_speed(s);
        if (!(ns > lo && ns < hi)) ns = 0.5 * (lo + hi);
        double step = ns - s;
        ts += integrate_gk([this](double x) { return inv_speed(x); }, s, ns, kAbsTol, kRelTol).value;
        s = ns;
        if (std::abs(step) <= 1e-15) break;
    }
    return s;
}

double action_J(const EMValue& v) {
    FiberQuadrature fq(v);
    const ReducedCubic& rc = fq.cubic();
    const double d = (1.0 - rc.gap_high) - (rc.gap_low - 1.0);
    auto integrand = [&](double s) {
        double sn = std::sin(s), c = std::cos(s);
        double s2 = sn * sn, c2 = c * c;
        double gap3 = (rc.z[2] - rc.z[1]) + d * c2;
        double one_plus = rc.gap_low + d * s2;
        double one_minus = rc.gap_high + d * c2;
        // d^2 s2 c2 / ((1+z)(1-z)) split so the axis limits stay finite
        return std::sqrt(2.0 * gap3) * (d * s2 / one_plus) * (d * c2 / one_minus);
    };
    return 2.0 / kPi * integrate_gk(integrand, 0.0, 0.5 * kPi, kAbsTol, kRelTol).value;
}

Periods periods(const EMValue& v) { return FiberQuadrature(v).periods(); }

FrequencyVector frequency_map(const EMValue& v) { return FiberQuadrature(v).frequencies(); }

AnglePair standard_angles(const PhasePoint& x, const FiberQuadrature& fq) {
    const ReducedCubic& rc = fq.cubic();
    const double d = (1.0 - rc.gap_high) - (rc.gap_low - 1.0);
    const double z = x.q[2];
    double u = std::clamp(((1.0 + z) - rc.gap_low) / d, 0.0, 1.0);
    double gap3 = std::max(rc.z[2] - z, 0.0);
    // sin s cos s from the vertical velocity; it pins s near the turning points
    double w = std::abs(x.p[2]) / (std::sqrt(2.0 * gap3) * d);
    double sn, cs;
    if (u < 0.5) {
        cs = std::sqrt(1.0 - u);
        sn = std::min(w / cs, 1.0);
    } else {
        sn = std::sqrt(u);
        cs = std::min(w / sn, 1.0);
    }
    double s = std::atan2(sn, cs);
    const Periods& P = fq.periods();
    double ts = fq.time_to(s), ps = fq.azimuth_to(s);
    double t, phi_ref;
    if (x.p[2] >= 0.0) {
        t = ts;
        phi_ref = ps;
    } else {
        t = P.T - ts;
        phi_ref = P.theta - ps;
    }
    FrequencyVector om = fq.frequencies();
    double phi = std::atan2(x.q[1], x.q[0]);
    return {wrap_2pi(om.omega1 * t), wrap_2pi(phi - phi_ref + om.omega2 * t)};
}

AnglePair standard_angles(const PhasePoint& x) {
    FiberQuadrature fq(em_map(x));
    return standard_angles(x, fq);
}

PhasePoint chart_point(const FiberQuadrature& fq, const AnglePair& a) {
    const ReducedCubic& rc = fq.cubic();
    if (rc.I == 0.0) throw DomainError("tori on the axis I = 0 are admitted only as a limit");
    const Periods& P = fq.periods();
    FrequencyVector om = fq.frequencies();
    double t = wrap_2pi(a.theta1) / om.omega1;
    double s, phi_ref, sign;
    if (t <= 0.5 * P.T) {
        s = fq.s_of_time(t);
        phi_ref = fq.azimuth_to(s);
        sign = 1.0;
    } else {
        s = fq.s_of_time(P.T - t);
        phi_ref = P.theta - fq.azimuth_to(s);
        sign = -1.0;
    }
    const double d = (1.0 - rc.gap_high) - (rc.gap_low - 1.0);
    double sn = std::sin(s), cs = std::cos(s);
    double one_plus = rc.gap_low + d * sn * sn;
    double one_minus = rc.gap_high + d * cs * cs;
    double z = one_plus - 1.0;
    double gap3 = (rc.z[2] - rc.z[1]) + d * cs * cs;
    double zdot = sign * std::sqrt(2.0 * gap3) * d * sn * cs;
    double phi = a.theta2 + phi_ref - om.omega2 * t;
    double rho2 = one_plus * one_minus;
    double rho = std::sqrt(rho2);
    double phidot = rc.I / rho2;
    double rhodot = -z * zdot / rho;
    double c = std::cos(phi), sphi = std::sin(phi);
    PhasePoint x;
    x.q = {rho * c, rho * sphi, z};
    x.p = {rhodot * c - rho * phidot * sphi, rhodot * sphi + rho * phidot * c, zdot};
    return x;
}

PhasePoint chart_point(const EMValue& v, const AnglePair& a) { return chart_point(FiberQuadrature(v), a); }

AnglePair chart_angles(const PhasePoint& x, const ChartSpec& chart) {
    EMValue v = em_map(x);
    FiberQuadrature fq(v);
    AnglePair a = standard_angles(x, fq);
    if (chart.gauge.isZero()) return a;
    double J = action_J(v);
    Eigen::Vector2d shift = chart.gauge * Eigen::Vector2d(J, v.I);
    return {wrap_2pi(a.theta1 + shift[0]), wrap_2pi(a.theta2 + shift[1])};
}

void validate_chart(const ChartSpec& chart) {
    const ValueWindow& w = chart.window;
    if (!(w.I1 > w.I0) || !(w.E1 > w.E0)) throw ConfigError(fmt::format("chart {} has an empty window", chart.id));
    if (!(chart.gamma > 0.0)) throw ConfigError(fmt::format("chart {} needs gamma > 0", chart.id));
    if ((chart.gauge - chart.gauge.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw ConfigError(fmt::format("chart {} gauge must be symmetric", chart.id));
    constexpr int n = 24;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            EMValue v = w.at(double(i) / n, double(j) / n);
            if (classify(v) != ValueClass::Regular || v.I == 0.0)
                throw DomainError(fmt::format("chart {} window contains the non-Regular value ({:.6g}, {:.6g})",
                                              chart.id, v.I, v.E));
        }
}

Eigen::Matrix2d frequency_jacobian(const EMValue& v, double h) {
    auto om = [](double I, double E) {
        FrequencyVector f = frequency_map({I, E});
        return Eigen::Vector2d(f.omega1, f.omega2);
    };
    Eigen::Matrix2d d_ie;
    d_ie.col(0) = (om(v.I + h, v.E) - om(v.I - h, v.E)) / (2.0 * h);
    d_ie.col(1) = (om(v.I, v.E + h) - om(v.I, v.E - h)) / (2.0 * h);
    Periods P = periods(v);
    Eigen::Matrix2d ij_ie;
    ij_ie << 1.0, 0.0, -P.theta / kTwoPi, P.T / kTwoPi;
    return d_ie * ij_ie.inverse();
}

NondegeneracyReport nondegeneracy_scan(const ValueWindow& region, int n, int m, double h, int jobs,
                                       bool skip_nonregular) {
    if (n < 1 || m < 1) throw ValidationError("scan grid must be at least 1x1");
    auto node = [&](int i, int j) {
        double u = n == 1 ? 0.5 : double(i) / (n - 1);
        double w = m == 1 ? 0.5 : double(j) / (m - 1);
        return region.at(u, w);
    };
    std::string bad;
    int nbad = 0;
    std::vector<EMValue> keep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            EMValue v = node(i, j);
            bool ok = classify(v) == ValueClass::Regular;
            for (int s = -1; ok && s <= 1; s += 2)
                ok = classify({v.I + s * h, v.E}) == ValueClass::Regular &&
                     classify({v.I, v.E + s * h}) == ValueClass::Regular;
            if (ok) {
                keep.push_back(v);
            } else {
                if (nbad < 16) bad += fmt::format(" ({:.6g}, {:.6g})", v.I, v.E);
                ++nbad;
            }
        }
    if (nbad > 0 && !skip_nonregular)
        throw DomainError(fmt::format("{} scan points are not Regular (with their stencil):{}{}", nbad, bad,
                                      nbad > 16 ? " ..." : ""));
    if (keep.empty()) throw DomainError("no Regular scan point in the region");
    NondegeneracyReport rep;
    rep.skipped = std::size_t(nbad);
    rep.rows.resize(keep.size());
    parallel_for(rep.rows.size(), jobs, [&](std::size_t k) {
        const EMValue v = keep[k];
        FiberQuadrature fq(v);
        FreqMapRow& r = rep.rows[k];
        r.I = v.I;
        r.E = v.E;
        r.J = action_J(v);
        r.T = fq.periods().T;
        r.Theta = fq.periods().theta_principal;
        FrequencyVector f = fq.frequencies();
        r.omega1 = f.omega1;
        r.omega2 = f.omega2;
        r.detJac = frequency_jacobian(v, h).determinant();
    });
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    for (const FreqMapRow& r : rep.rows) {
        double a = std::abs(r.detJac);
        if (a < rep.min_abs_det) {
            rep.min_abs_det = a;
            rep.argmin = {r.I, r.E};
        }
        rep.max_abs_det = std::max(rep.max_abs_det, a);
    }
    return rep;
}

}  // namespace torus_atlas
