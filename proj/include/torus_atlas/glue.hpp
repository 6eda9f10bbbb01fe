#pragma once

#include "torus_atlas/kam.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace torus_atlas {

// exp(-1 / (1 - s^2)) on |s| < 1, zero elsewhere.
double bump(double s);

// Functions of the value (I, E), hence constant on fibers.
class PartitionOfUnity {
public:
    PartitionOfUnity() = default;
    PartitionOfUnity(std::vector<ChartSpec> cover, std::vector<ValueWindow> supports, ValueWindow region);

    const std::vector<ChartSpec>& cover() const { return cover_; }
    const std::vector<ValueWindow>& supports() const { return supports_; }
    const ValueWindow& region() const { return region_; }

    std::vector<double> raw(const EMValue& v) const;
    // Normalized weights; DomainError where no support reaches v.
    std::vector<double> weights(const EMValue& v) const;
    std::vector<double> weights(const PhasePoint& x) const;

private:
    std::vector<ChartSpec> cover_;
    std::vector<ValueWindow> supports_;
    ValueWindow region_;
};

// Support of chart j: its window shrunk by `inset` of the width on every
// side. The region is checked on a (checks+1)^2 lattice including its edges;
// a lattice point outside every support raises CoverageGap.
PartitionOfUnity build_partition(const std::vector<ChartSpec>& cover, const ValueWindow& region, double inset = 0.1,
                                 int checks = 200);

struct TransitionMap {
    int i = 0, j = 0;
    Eigen::Matrix2i S = Eigen::Matrix2i::Identity();
    AnglePair c;             // mean of the angle-difference field
    double deviation = 0.0;  // sup |field - c|
    double image_distance = 0.0;  // sup distance between the two image tori
};

// Compares Psi^i and Psi^j on a torus solved in both charts. Raises
// OverlapMismatch when the deviation exceeds lemma_tol.
TransitionMap overlap_translation(const ChartSpec& ci, const SolvedTorus& ti, const ChartSpec& cj,
                                  const SolvedTorus& tj, double lemma_tol = 1e-6, int samples = 16);

// Glued conjugacy restricted to one Diophantine fiber.
struct GluedFiber {
    EMValue value;
    ActionPair action;
    FrequencyVector omega;
    int reference = 0;               // chart id
    std::vector<int> charts;         // ids with positive weight
    std::vector<double> weights;
    std::vector<TransitionMap> transitions;  // reference -> chart
    AnglePair mean_translation;
    SolvedTorus reference_torus;
    Eigen::Matrix2d reference_gauge = Eigen::Matrix2d::Zero();
    TorusEmbedding integrable;  // standard angles

    // Phi(K0(u)): the perturbed point matched with the integrable point u.
    Vec6 map(const AnglePair& u) const;
    Vec6 identity(const AnglePair& u) const { return integrable.evaluate(u); }
};

class GlobalConjugacy {
public:
    GlobalConjugacy() = default;
    GlobalConjugacy(PartitionOfUnity pu, std::vector<std::shared_ptr<const LocalConjugacy>> locals, double lemma_tol);

    const PartitionOfUnity& partition() const { return pu_; }
    const std::vector<std::shared_ptr<const LocalConjugacy>>& locals() const { return locals_; }
    double lemma_tol() const { return lemma_tol_; }
    const HamiltonianSpec& spec() const { return locals_.front()->spec(); }

    // Whether every chart weighing on v accepts v as a Diophantine value.
    bool admits(const EMValue& v) const;
    // DomainError for values outside the region or off the Diophantine set.
    GluedFiber fiber(const EMValue& v) const;

private:
    PartitionOfUnity pu_;
    std::vector<std::shared_ptr<const LocalConjugacy>> locals_;  // same order as the cover
    double lemma_tol_ = 1e-6;
};

GlobalConjugacy glue(std::vector<std::shared_ptr<const LocalConjugacy>> locals, const PartitionOfUnity& pu,
                     double lemma_tol = 1e-6);

struct FiberDefect {
    EMValue value;
    double defect = 0.0;          // flow commutation
    double identity_distance = 0.0;  // sup |Phi(x) - x|
    double max_deviation = 0.0;
    int reference = 0;
    AnglePair mean_translation;
};

struct ConjugacyReport {
    double max_defect = 0.0;
    double max_identity_distance = 0.0;
    std::vector<FiberDefect> fibers;
};

// For each value and `points` seeded angles u: |phi_{H+eps F}^t(Phi(K0(u))) -
// Phi(K0(u + omega t))| over t <= t_end, with Phi from the glued map.
ConjugacyReport verify_global_conjugacy(const GlobalConjugacy& g, const std::vector<EMValue>& values, int points,
                                        double t_end, std::uint64_t seed = 1, double h = 0.01, int jobs = 0);

// Up to `count` admitted values drawn from the region by seeded rejection sampling.
std::vector<EMValue> sample_glued_values(const GlobalConjugacy& g, int count, std::uint64_t seed);

}  // namespace torus_atlas
