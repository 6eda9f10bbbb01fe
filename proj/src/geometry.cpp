#include "torus_atlas/geometry.hpp"

#include "torus_atlas/errors.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/AutoDiff>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace torus_atlas {

namespace {

// Kahan & Li, symmetric 9-stage composition of order 6.
constexpr std::array<double, 9> kComp6 = {
    0.39216144400731413927925056, 0.33259913678935943859974864, -0.70624617255763935980996482,
    0.08221359629355080023149045, 0.79854399093482996339895035, 0.08221359629355080023149045,
    -0.70624617255763935980996482, 0.33259913678935943859974864, 0.39216144400731413927925056,
};

constexpr int kMaxProjection = 50;

bool separable(const HamiltonianSpec& spec) {
    return spec.epsilon == 0.0 || spec.perturbation != Perturbation::KineticHeight;
}

Eigen::Vector3d grad_q(const Eigen::Vector3d& q, const Eigen::Vector3d& p, const HamiltonianSpec& spec) {
    double hq[3], hp[3];
    energy_gradient(q.data(), p.data(), spec, hq, hp);
    return {hq[0], hq[1], hq[2]};
}

// Multiplier for the position update: |r - h^2 lambda q0| = 1, smallest root.
double position_multiplier(const Eigen::Vector3d& r, const Eigen::Vector3d& q0, double h) {
    double h2 = h * h;
    double a = h2 * h2 * q0.squaredNorm();
    double b = -2.0 * h2 * r.dot(q0);
    double c = r.squaredNorm() - 1.0;
    double disc = b * b - 4.0 * a * c;
    if (!(disc >= 0.0)) return std::nan("");
    double s = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (s == 0.0) return 0.0;
    return c / s;
}

PhasePoint rattle_separable(const PhasePoint& x, const HamiltonianSpec& spec, double h) {
    const Eigen::Vector3d g0 = grad_q(x.q, x.p, spec);
    const Eigen::Vector3d r = x.q + h * x.p - 0.5 * h * h * g0;
    double lam = position_multiplier(r, x.q, h);
    if (!std::isfinite(lam)) throw IntegrationError("position constraint has no real multiplier", 0.0);
    Eigen::Vector3d q1 = r - h * h * lam * x.q;
    q1 /= q1.norm();
    Eigen::Vector3d ph = x.p - 0.5 * h * (g0 + 2.0 * lam * x.q);
    Eigen::Vector3d w = ph - 0.5 * h * grad_q(q1, ph, spec);
    double mu = q1.dot(w) / (h * q1.squaredNorm());
    return {q1, w - h * mu * q1};
}

using Ad7 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 7, 1>>;

// Generalized RATTLE (Lobatto IIIA-IIIB pair) for H_p depending on q.
PhasePoint rattle_implicit(const PhasePoint& x, const HamiltonianSpec& spec, double h) {
    Eigen::Matrix<double, 7, 1> y;
    {
        PhasePoint guess = rattle_separable(x, HamiltonianSpec{}, h);
        y << (guess.q - x.q) / h, guess.q, 0.0;
    }
    auto residual = [&](const Eigen::Matrix<double, 7, 1>& yv, Eigen::Matrix<double, 7, 7>* jac) {
        Ad7 v[7];
        for (int i = 0; i < 7; ++i) v[i] = Ad7(yv[i], 7, i);
        Ad7 q0[3], ph[3], q1[3];
        for (int i = 0; i < 3; ++i) {
            q0[i] = Ad7(x.q[i]);
            q0[i].derivatives() = Eigen::Matrix<double, 7, 1>::Zero();
            ph[i] = v[i];
            q1[i] = v[3 + i];
        }
        Ad7 hq0[3], hp0[3], hq1[3], hp1[3];
        energy_gradient(q0, ph, spec, hq0, hp0);
        energy_gradient(q1, ph, spec, hq1, hp1);
        Ad7 res[7];
        for (int i = 0; i < 3; ++i) {
            res[i] = ph[i] - x.p[i] + 0.5 * h * (hq0[i] + 2.0 * v[6] * q0[i]);
            res[3 + i] = q1[i] - q0[i] - 0.5 * h * (hp0[i] + hp1[i]);
        }
        res[6] = q1[0] * q1[0] + q1[1] * q1[1] + q1[2] * q1[2] - 1.0;
        Eigen::Matrix<double, 7, 1> out;
        for (int i = 0; i < 7; ++i) {
            out[i] = res[i].value();
            if (jac) jac->row(i) = res[i].derivatives().transpose();
        }
        return out;
    };
    bool converged = false;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxProjection; ++it) {
        Eigen::Matrix<double, 7, 7> jac;
        Eigen::Matrix<double, 7, 1> r = residual(y, &jac);
        Eigen::Matrix<double, 7, 1> dy = jac.partialPivLu().solve(-r);
        if (!dy.allFinite()) break;
        y += dy;
        double size = dy.head<6>().lpNorm<Eigen::Infinity>();
        double scale = 1.0 + y.head<6>().lpNorm<Eigen::Infinity>();
        // stop at the round-off floor: tiny update, or one that no longer shrinks
        if (size <= 4e-16 * scale || (size <= 1e-13 * scale && size >= 0.5 * prev)) {
            converged = true;
            break;
        }
        prev = size;
    }
    if (!converged) throw IntegrationError("implicit RATTLE stage did not converge", 0.0);
    Eigen::Vector3d ph = y.head<3>();
    Eigen::Vector3d q1 = y.segment<3>(3);
    q1 /= q1.norm();
    Eigen::Vector3d w = ph - 0.5 * h * grad_q(q1, ph, spec);
    double mu = q1.dot(w) / (h * q1.squaredNorm());
    return {q1, w - h * mu * q1};
}

}  // namespace

Perturbation parse_perturbation(std::string_view name) {
    if (name == "F1" || name == "tilted_gravity") return Perturbation::TiltedGravity;
    if (name == "F2" || name == "quadrupole") return Perturbation::Quadrupole;
    if (name == "F3" || name == "kinetic_height") return Perturbation::KineticHeight;
    throw ValidationError(fmt::format("unknown perturbation id '{}'", name));
}

std::string perturbation_name(Perturbation f) {
    switch (f) {
    case Perturbation::TiltedGravity: return "F1";
    case Perturbation::Quadrupole: return "F2";
    case Perturbation::KineticHeight: return "F3";
    }
    return "?";
}

double constraint_defect(const PhasePoint& x) {
    return std::max(std::abs(x.q.squaredNorm() - 1.0), std::abs(x.q.dot(x.p)));
}

void require_valid(const PhasePoint& x, double tol) {
    if (!x.q.allFinite() || !x.p.allFinite())
        throw InvalidPointError("phase point has non-finite coordinates");
    double d = constraint_defect(x);
    if (d > tol)
        throw InvalidPointError(fmt::format("phase point violates the constraints by {:.3e}", d));
}

PhasePoint project(const PhasePoint& x) {
    double n = x.q.norm();
    if (!(n > 0.0)) throw InvalidPointError("cannot project a point with q = 0");
    Eigen::Vector3d q = x.q / n;
    return {q, x.p - q.dot(x.p) * q};
}

double hamiltonian(const PhasePoint& x) {
    require_valid(x);
    return 0.5 * x.p.squaredNorm() + x.q[2];
}

double perturbation_value(const PhasePoint& x, const HamiltonianSpec& spec) {
    switch (spec.perturbation) {
    case Perturbation::TiltedGravity: return x.q[0];
    case Perturbation::Quadrupole: return x.q[0] * x.q[2];
    case Perturbation::KineticHeight: return 0.5 * x.q[2] * x.p.squaredNorm();
    }
    return 0.0;
}

double total_energy(const PhasePoint& x, const HamiltonianSpec& spec) {
    return hamiltonian(x) + spec.epsilon * perturbation_value(x, spec);
}

Vec6 vector_field(const Vec6& x, const HamiltonianSpec& spec) {
    Vec6 out;
    dirac_field(x.data(), spec, out.data());
    return out;
}

Vec6 vector_field(const PhasePoint& x, const HamiltonianSpec& spec) {
    require_valid(x);
    return vector_field(x.to_vec(), spec);
}

Mat6 vector_field_jacobian(const Vec6& x, const HamiltonianSpec& spec) {
    using Ad6 = Eigen::AutoDiffScalar<Vec6>;
    Ad6 ax[6], out[6];
    for (int i = 0; i < 6; ++i) ax[i] = Ad6(x[i], 6, i);
    dirac_field(ax, spec, out);
    Mat6 jac;
    for (int i = 0; i < 6; ++i) jac.row(i) = out[i].derivatives().transpose();
    return jac;
}

PhasePoint rattle_step(const PhasePoint& x, const HamiltonianSpec& spec, double h) {
    return separable(spec) ? rattle_separable(x, spec, h) : rattle_implicit(x, spec, h);
}

PhasePoint step(const PhasePoint& x, const HamiltonianSpec& spec, double h, Scheme scheme) {
    if (scheme == Scheme::Rattle) return rattle_step(x, spec, h);
    PhasePoint y = x;
    for (double g : kComp6) y = rattle_step(y, spec, g * h);
    return y;
}

namespace {

template <class Sink>
void march(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h, Scheme scheme,
           Sink&& sink) {
    if (!(h > 0.0) || !(t_end > 0.0)) throw ValidationError("integrate needs h > 0 and t_end > 0");
    require_valid(x0);
    const long n = std::max(1L, static_cast<long>(std::ceil(t_end / h - 1e-9)));
    PhasePoint x = x0;
    for (long k = 1; k <= n; ++k) {
        double hk = (k == n) ? t_end - (n - 1) * h : h;
        double t = (k == n) ? t_end : k * h;
        try {
            x = step(x, spec, hk, scheme);
        } catch (const IntegrationError& e) {
            throw IntegrationError(fmt::format("{} at t = {:.6f}", e.what(), t - hk), t - hk);
        }
        sink(k, n, t, x);
    }
}

}  // namespace

Trajectory integrate(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h,
                     const IntegrateOptions& opt) {
    Trajectory tr;
    tr.step = h;
    const int stride = std::max(1, opt.stride);
    tr.time.push_back(0.0);
    tr.points.push_back(x0);
    march(x0, spec, t_end, h, opt.scheme, [&](long k, long n, double t, const PhasePoint& x) {
        if (k % stride == 0 || k == n) {
            tr.time.push_back(t);
            tr.points.push_back(x);
        }
    });
    return tr;
}

PhasePoint flow(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h, Scheme scheme) {
    if (t_end == 0.0) return x0;
    PhasePoint out = x0;
    march(x0, spec, t_end, h, scheme, [&](long, long, double, const PhasePoint& x) { out = x; });
    return out;
}

}  // namespace torus_atlas
