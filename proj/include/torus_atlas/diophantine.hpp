#pragma once

#include "torus_atlas/action_angle.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace torus_atlas {

struct DiophantineParams {
    double gamma = 1e-3;
    double tau = 1.5;
    int k_max = 200;
    // Boundary shrink of the frequency domain; negative means "same as gamma".
    double gamma_tilde = -1.0;

    double shrink() const { return gamma_tilde < 0.0 ? gamma : gamma_tilde; }
    void validate() const;
};

// Verdict over 0 < |k|_inf <= k_max with weight |k|_1^tau. A pass is only
// "truncation-certified": larger k are not examined.
struct DiophantineVerdict {
    bool accepted = false;
    double margin = 0.0;  // min |<omega,k>| |k|_1^tau - gamma
    int k1 = 0, k2 = 0;   // minimizing k
};

DiophantineVerdict is_diophantine(const FrequencyVector& omega, const DiophantineParams& p);

// Checks the condition on the convergents of omega2/omega1, reaching far
// beyond k_max along the directions where small divisors concentrate.
struct ContinuedFractionCertificate {
    bool accepted = false;
    double margin = 0.0;
    std::vector<long long> partial_quotients;
    long long largest_denominator = 0;
};

ContinuedFractionCertificate continued_fraction_certificate(const FrequencyVector& omega, const DiophantineParams& p,
                                                            long long max_denominator = 1000000);

bool ray_check(const FrequencyVector& omega, const DiophantineParams& p, const std::vector<double>& s_values);

// A resonant frequency close to omega: the projection of omega onto the
// resonance line <., k> = 0 of the k minimizing |<omega,k>| / |k|_2.
struct NearbyResonance {
    FrequencyVector omega;
    double distance = 0.0;
    int k1 = 0, k2 = 0;
};

NearbyResonance nearby_resonance(const FrequencyVector& omega, int k_max = 200);

// Polygonal sample of a frequency image with an erosion depth: contains()
// is "inside the polygon and farther than erosion from its boundary".
class FrequencyDomain {
public:
    FrequencyDomain() = default;
    explicit FrequencyDomain(std::vector<Eigen::Vector2d> polygon);

    const std::vector<Eigen::Vector2d>& polygon() const { return poly_; }
    double erosion() const { return erosion_; }
    bool empty() const { return empty_; }

    bool inside_polygon(const Eigen::Vector2d& w) const;
    double boundary_distance(const Eigen::Vector2d& w) const;
    bool contains(const FrequencyVector& w) const;
    bool contains(const Eigen::Vector2d& w) const;
    Eigen::Vector2d lower() const { return lo_; }
    Eigen::Vector2d upper() const { return hi_; }

    // Estimates on a samples x samples lattice over the bounding box.
    double inradius(int samples = 256) const;  // of the eroded set
    double area(int samples = 512) const;      // of the eroded set

private:
    friend FrequencyDomain shrink_domain(const FrequencyDomain&, double);
    std::vector<Eigen::Vector2d> poly_;
    Eigen::Vector2d lo_ = Eigen::Vector2d::Zero(), hi_ = Eigen::Vector2d::Zero();
    double erosion_ = 0.0;
    bool empty_ = false;
};

// Image of the chart window boundary under the frequency map.
FrequencyDomain frequency_domain(const ChartSpec& chart, int samples_per_edge = 32);
// Erodes by gt more; the result is flagged empty when nothing survives.
FrequencyDomain shrink_domain(const FrequencyDomain& domain, double gt);

struct LabeledNode {
    EMValue value;
    ActionPair action;
    FrequencyVector omega;
    bool in_domain = false;  // omega in the shrunken frequency domain
    DiophantineVerdict verdict;
    bool in = false;
};

struct LabeledGrid {
    int n = 0, m = 0;  // along I, along E
    std::vector<LabeledNode> nodes;  // I-major: index i*m + j

    const LabeledNode& at(int i, int j) const { return nodes[std::size_t(i) * m + j]; }
    double in_fraction() const;
};

// Grid nodes include the window corners.
LabeledGrid diophantine_set_in_chart(const ChartSpec& chart, const DiophantineParams& p, int n, int m, int jobs = 0);

struct FrequencySample {
    double omega1 = 0.0, omega2 = 0.0;
    bool accepted = false;
    double margin = 0.0;
};

struct MeasureEstimate {
    double fraction = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    std::size_t accepted = 0;
};

// Fraction of the domain polygon lying in D_gamma of the domain shrunk by
// gamma_tilde. Sample i depends only on (seed, i).
MeasureEstimate measure_estimate(const FrequencyDomain& domain, const DiophantineParams& p, std::size_t samples,
                                 std::uint64_t seed, int jobs = 0, std::vector<FrequencySample>* trace = nullptr);

// Counter-based uniform deviate in [0, 1) for (seed, stream, index).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace torus_atlas
