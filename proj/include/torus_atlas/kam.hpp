#pragma once

#include "torus_atlas/diophantine.hpp"
#include "torus_atlas/torus.hpp"

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <vector>

namespace torus_atlas {

struct KamConfig {
    double newton_tol = 1e-10;
    int max_newton = 12;
    int N = 64;
    // Largest coefficient with max(|k1|,|k2|) >= N/4, relative to the largest one.
    double tail_tol = 1e-8;
    // Empirical ceiling on |epsilon|; requests above it fail before iterating.
    double smallness_guard = std::numeric_limits<double>::infinity();
    // Newton corrections keep modes with |k_i| <= filter_fraction * N / 2.
    double filter_fraction = 2.0 / 3.0;
    // Exponent used for the small-divisor ledger.
    double tau = 1.5;

    void validate() const;
};

struct SolvedTorus {
    EMValue value;  // integrable seed
    FrequencyVector omega;
    TorusEmbedding K;
    double residual = 0.0;
    double epsilon = 0.0;
    Perturbation perturbation = Perturbation::TiltedGravity;
    // Invariance residual of the seed followed by one entry per Newton step.
    std::vector<double> residual_history;
    int iterations = 0;
    // min |<omega,k>| |k|_1^tau over the modes inverted by the solver
    double min_weighted_divisor = 0.0;
};

// sup over the grid and the six components of |DK omega - X(K)|, DK by
// spectral differentiation.
double invariance_residual(const TorusEmbedding& K, const FrequencyVector& omega, const HamiltonianSpec& spec);

// Translates K so that the mean of wrap(alpha(K(theta)) - theta) vanishes,
// alpha = standard angles + gauge * (J, I).
TorusEmbedding normalize_gauge(const TorusEmbedding& K, const Eigen::Matrix2d& gauge = Eigen::Matrix2d::Zero());

// Newton iteration for DK omega = X(K) from the seed, followed by gauge
// normalization. With epsilon = 0 the seed is only normalized.
SolvedTorus solve_invariance(const TorusEmbedding& seed, const FrequencyVector& omega, const HamiltonianSpec& spec,
                             const KamConfig& cfg, const Eigen::Matrix2d& gauge = Eigen::Matrix2d::Zero());

// Integrable seed at v, then solve_invariance.
SolvedTorus solve_torus(const EMValue& v, const HamiltonianSpec& spec, const KamConfig& cfg,
                        const Eigen::Matrix2d& gauge = Eigen::Matrix2d::Zero());

// Max distance between the perturbed flow from K(theta0) and K(theta0 + omega t)
// over t in [0, t_end], for `samples` seeded random theta0.
double validate_torus(const SolvedTorus& st, const HamiltonianSpec& spec, double t_end, int samples = 4,
                      std::uint64_t seed = 1, double h = 0.01);

struct GuardCalibration {
    double guard = 0.0;    // largest epsilon that solved
    double failing = 0.0;  // smallest epsilon that did not
    int solves = 0;
};

// Bisection in log(epsilon) between eps_lo (must solve) and eps_hi.
GuardCalibration calibrate_guard(const EMValue& v, Perturbation f, KamConfig cfg, double eps_lo = 1e-4,
                                 double eps_hi = 1.0, int bisections = 12);

class LocalConjugacy {
public:
    LocalConjugacy() = default;

    const ChartSpec& chart() const { return chart_; }
    const HamiltonianSpec& spec() const { return spec_; }
    const DiophantineParams& params() const { return params_; }
    const KamConfig& config() const { return cfg_; }
    const LabeledGrid& grid() const { return grid_; }
    // Solved tori at the Diophantine nodes, I-major like grid().
    const std::vector<std::optional<SolvedTorus>>& tori() const { return tori_; }
    std::size_t solved_count() const;

    // Whether v is in the chart window and omega(v) in D_gamma of the shrunken domain.
    bool admits(const EMValue& v) const;
    // Torus at v from spline interpolation of K - K0 over the action grid;
    // with polish, refined by Newton. Throws DomainError when !admits(v).
    SolvedTorus torus_at(const EMValue& v, bool polish = true) const;

    friend LocalConjugacy build_local_conjugacy(const ChartSpec&, const HamiltonianSpec&, const DiophantineParams&,
                                                int, int, const KamConfig&, int);

private:
    ChartSpec chart_;
    HamiltonianSpec spec_;
    DiophantineParams params_;
    KamConfig cfg_;
    LabeledGrid grid_;
    FrequencyDomain shrunk_;
    std::vector<std::optional<SolvedTorus>> tori_;
    std::vector<Matrix6X> offsets_;  // K - K0 in chart gauge, holes filled
    std::vector<double> I_nodes_, E_nodes_;
};

// Solves every Diophantine node of an n x m action grid over the chart.
LocalConjugacy build_local_conjugacy(const ChartSpec& chart, const HamiltonianSpec& spec, const DiophantineParams& p,
                                     int n, int m, const KamConfig& cfg, int jobs = 0);

// Integrable torus at v in the chart gauge: theta -> K0(theta - gauge (J, I)).
TorusEmbedding gauged_embedding(const EMValue& v, int n, const Eigen::Matrix2d& gauge);

// Wraps an angle difference to (-pi, pi].
double wrap_angle(double a);

}  // namespace torus_atlas
