#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace torus_atlas {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Point of T*S^2 embedded in R^6 (unit length, unit mass, unit gravity).
struct PhasePoint {
    Eigen::Vector3d q = Eigen::Vector3d::Zero();
    Eigen::Vector3d p = Eigen::Vector3d::Zero();

    PhasePoint() = default;
    PhasePoint(const Eigen::Vector3d& q_, const Eigen::Vector3d& p_) : q(q_), p(p_) {}
    static PhasePoint from_vec(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
    Vec6 to_vec() const {
        Vec6 v;
        v << q, p;
        return v;
    }
};

enum class Perturbation {
    TiltedGravity,  // F = q1
    Quadrupole,     // F = q1 q3
    KineticHeight,  // F = q3 |p|^2 / 2
};

Perturbation parse_perturbation(std::string_view name);
std::string perturbation_name(Perturbation f);

struct HamiltonianSpec {
    double epsilon = 0.0;
    Perturbation perturbation = Perturbation::TiltedGravity;
};

inline constexpr double kConstraintTol = 1e-12;
// Accepted defect for points handed in by callers (Fourier evaluations etc.).
inline constexpr double kInputTol = 1e-8;

double constraint_defect(const PhasePoint& x);
void require_valid(const PhasePoint& x, double tol = kInputTol);
PhasePoint project(const PhasePoint& x);

double hamiltonian(const PhasePoint& x);
double perturbation_value(const PhasePoint& x, const HamiltonianSpec& spec);
double total_energy(const PhasePoint& x, const HamiltonianSpec& spec);

// Gradient of H + eps F in the ambient coordinates.
template <class T>
void energy_gradient(const T* q, const T* p, const HamiltonianSpec& spec, T* hq, T* hp) {
    const double e = spec.epsilon;
    hq[0] = T(0.0);
    hq[1] = T(0.0);
    hq[2] = T(1.0);
    hp[0] = p[0];
    hp[1] = p[1];
    hp[2] = p[2];
    if (e == 0.0) return;
    switch (spec.perturbation) {
    case Perturbation::TiltedGravity:
        hq[0] += e;
        break;
    case Perturbation::Quadrupole:
        hq[0] += e * q[2];
        hq[2] += e * q[0];
        break;
    case Perturbation::KineticHeight: {
        T pp = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        hq[2] += 0.5 * e * pp;
        for (int i = 0; i < 3; ++i) hp[i] = hp[i] + e * q[2] * p[i];
        break;
    }
    }
}

// Constrained Hamiltonian vector field extended to all of R^6 by the Dirac
// multipliers, so |q|^2 and q.p are first integrals off the manifold too.
template <class T>
void dirac_field(const T* x, const HamiltonianSpec& spec, T* out) {
    const T* q = x;
    const T* p = x + 3;
    T hq[3], hp[3];
    energy_gradient(q, p, spec, hq, hp);
    T qq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    T q_hp = q[0] * hp[0] + q[1] * hp[1] + q[2] * hp[2];
    T p_hp = p[0] * hp[0] + p[1] * hp[1] + p[2] * hp[2];
    T q_hq = q[0] * hq[0] + q[1] * hq[1] + q[2] * hq[2];
    T l2 = -q_hp / qq;
    T l1 = (p_hp - q_hq) / (2.0 * qq);
    for (int i = 0; i < 3; ++i) {
        out[i] = hp[i] + l2 * q[i];
        out[i + 3] = -hq[i] - 2.0 * l1 * q[i] - l2 * p[i];
    }
}

Vec6 vector_field(const PhasePoint& x, const HamiltonianSpec& spec);
Vec6 vector_field(const Vec6& x, const HamiltonianSpec& spec);
Mat6 vector_field_jacobian(const Vec6& x, const HamiltonianSpec& spec);

enum class Scheme {
    Rattle,        // second order, symmetric
    Composition6,  // symmetric 9-stage composition of Rattle, order 6
};

PhasePoint rattle_step(const PhasePoint& x, const HamiltonianSpec& spec, double h);
PhasePoint step(const PhasePoint& x, const HamiltonianSpec& spec, double h,
                Scheme scheme = Scheme::Composition6);

struct Trajectory {
    std::vector<double> time;
    std::vector<PhasePoint> points;
    double step = 0.0;

    std::size_t size() const { return time.size(); }
};

struct IntegrateOptions {
    Scheme scheme = Scheme::Composition6;
    int stride = 1;  // record every stride-th step (the endpoint is always kept)
};

Trajectory integrate(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h,
                     const IntegrateOptions& opt = {});
// Endpoint only.
PhasePoint flow(const PhasePoint& x0, const HamiltonianSpec& spec, double t_end, double h,
                Scheme scheme = Scheme::Composition6);

}  // namespace torus_atlas
