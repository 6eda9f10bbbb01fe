#include "torus_atlas/diophantine.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"
#include "torus_atlas/simd/kernels.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace torus_atlas {

void DiophantineParams::validate() const {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(tau > 1.0)) throw ConfigError("tau must exceed n - 1 = 1");
    if (k_max < 10) throw ConfigError("k_max must be at least 10");
}

namespace {

// n^tau for n = 0 .. 2 k_max, shared between calls.
const std::vector<double>& power_table(double tau, int k_max) {
    static std::mutex m;
    static std::map<std::pair<double, int>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto& t = cache[{tau, k_max}];
    if (t.empty()) {
        t.resize(2 * std::size_t(k_max) + 2);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::pow(double(i), tau);
    }
    return t;
}

double weighted(double w1, double w2, int k1, int k2, const std::vector<double>& tab) {
    return std::abs(std::fma(w1, double(k1), w2 * k2)) * tab[std::abs(k1) + std::abs(k2)];
}

}  // namespace

DiophantineVerdict is_diophantine(const FrequencyVector& omega, const DiophantineParams& p) {
    const int K = p.k_max;
    const auto& tab = power_table(p.tau, K);
    const auto& ker = simd::active();
    const double w1 = omega.omega1, w2 = omega.omega2;
    double best = std::numeric_limits<double>::infinity();
    int best_row = 0, best_half = 0;
    auto consider = [&](double v, int row, int half) {
        if (v < best) {
            best = v;
            best_row = row;
            best_half = half;
        }
    };
    // half-plane k2 >= 0; for k2 = 0 only k1 > 0
    consider(ker.resonance_min(w1, 0.0, 1, K, tab.data() + 1), 0, 1);
    for (int k2 = 1; k2 <= K; ++k2) {
        double b = w2 * k2;
        consider(ker.resonance_min(w1, b, 0, K + 1, tab.data() + k2), k2, 1);
        // k1 = -m: |w1 (-m) + b| = |w1 m - b|
        consider(ker.resonance_min(w1, -b, 1, K, tab.data() + 1 + k2), k2, -1);
    }
    DiophantineVerdict v;
    v.margin = best - p.gamma;
    v.accepted = v.margin >= 0.0;
    double found = std::numeric_limits<double>::infinity();
    int lo = best_half > 0 ? (best_row == 0 ? 1 : 0) : 1;
    for (int m = lo; m <= K; ++m) {
        int k1 = best_half > 0 ? m : -m;
        double val = weighted(w1, w2, k1, best_row, tab);
        if (val < found) {
            found = val;
            v.k1 = k1;
            v.k2 = best_row;
        }
    }
    return v;
}

ContinuedFractionCertificate continued_fraction_certificate(const FrequencyVector& omega, const DiophantineParams& p,
                                                            long long max_denominator) {
    ContinuedFractionCertificate c;
    if (!(omega.omega1 != 0.0)) return c;
    const double w1 = std::abs(omega.omega1);
    double r = omega.omega2 / omega.omega1;
    // convergents p/q of r; the small divisors are w1 |q r - p|
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(r)), q1 = 1;
    double x = r - std::floor(r);
    c.partial_quotients.push_back(p1);
    double best = std::numeric_limits<double>::infinity();
    for (int depth = 0; depth < 60; ++depth) {
        double div = w1 * std::abs(double(q1) * r - double(p1));
        double norm = double(std::llabs(p1) + std::llabs(q1));
        if (div > 0.0) best = std::min(best, div * std::pow(norm, p.tau));
        c.largest_denominator = q1;
        if (x < 1e-15) break;
        double inv = 1.0 / x;
        long long a = static_cast<long long>(std::floor(inv));
        x = inv - std::floor(inv);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_denominator) break;
        c.partial_quotients.push_back(a);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    c.margin = best - p.gamma;
    c.accepted = c.margin >= 0.0;
    return c;
}

bool ray_check(const FrequencyVector& omega, const DiophantineParams& p, const std::vector<double>& s_values) {
    for (double s : s_values) {
        if (!is_diophantine({s * omega.omega1, s * omega.omega2}, p).accepted) return false;
    }
    return true;
}

NearbyResonance nearby_resonance(const FrequencyVector& omega, int k_max) {
    NearbyResonance out;
    double best = std::numeric_limits<double>::infinity();
    for (int k2 = 0; k2 <= k_max; ++k2)
        for (int k1 = -k_max; k1 <= k_max; ++k1) {
            if (k2 == 0 && k1 <= 0) continue;
            double nk = std::hypot(double(k1), double(k2));
            double d = std::abs(omega.omega1 * k1 + omega.omega2 * k2) / nk;
            if (d < best) {
                best = d;
                out.k1 = k1;
                out.k2 = k2;
            }
        }
    double dot = omega.omega1 * out.k1 + omega.omega2 * out.k2;
    double kk = double(out.k1) * out.k1 + double(out.k2) * out.k2;
    out.omega = {omega.omega1 - dot / kk * out.k1, omega.omega2 - dot / kk * out.k2};
    out.distance = best;
    return out;
}

FrequencyDomain::FrequencyDomain(std::vector<Eigen::Vector2d> polygon) : poly_(std::move(polygon)) {
    if (poly_.size() < 3) throw ValidationError("frequency domain needs at least 3 vertices");
    lo_ = hi_ = poly_[0];
    for (const auto& v : poly_) {
        lo_ = lo_.cwiseMin(v);
        hi_ = hi_.cwiseMax(v);
    }
}

bool FrequencyDomain::inside_polygon(const Eigen::Vector2d& w) const {
    bool in = false;
    for (std::size_t i = 0, j = poly_.size() - 1; i < poly_.size(); j = i++) {
        const auto &a = poly_[i], &b = poly_[j];
        if ((a.y() > w.y()) != (b.y() > w.y())) {
            double x = a.x() + (w.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (w.x() < x) in = !in;
        }
    }
    return in;
}

double FrequencyDomain::boundary_distance(const Eigen::Vector2d& w) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = poly_.size() - 1; i < poly_.size(); j = i++) {
        Eigen::Vector2d a = poly_[j], e = poly_[i] - a;
        double len2 = e.squaredNorm();
        double t = len2 > 0.0 ? std::clamp((w - a).dot(e) / len2, 0.0, 1.0) : 0.0;
        d = std::min(d, (a + t * e - w).norm());
    }
    return d;
}

bool FrequencyDomain::contains(const Eigen::Vector2d& w) const {
    if (empty_ || !inside_polygon(w)) return false;
    return erosion_ <= 0.0 || boundary_distance(w) > erosion_;
}

bool FrequencyDomain::contains(const FrequencyVector& w) const { return contains(Eigen::Vector2d(w.omega1, w.omega2)); }

double FrequencyDomain::inradius(int samples) const {
    if (empty_) return 0.0;
    double best = 0.0;
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
            Eigen::Vector2d w(lo_.x() + (i + 0.5) / samples * (hi_.x() - lo_.x()),
                              lo_.y() + (j + 0.5) / samples * (hi_.y() - lo_.y()));
            if (inside_polygon(w)) best = std::max(best, boundary_distance(w));
        }
    return std::max(0.0, best - erosion_);
}

double FrequencyDomain::area(int samples) const {
    if (empty_) return 0.0;
    long hits = 0;
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
            Eigen::Vector2d w(lo_.x() + (i + 0.5) / samples * (hi_.x() - lo_.x()),
                              lo_.y() + (j + 0.5) / samples * (hi_.y() - lo_.y()));
            if (contains(w)) ++hits;
        }
    return double(hits) / (double(samples) * samples) * (hi_.x() - lo_.x()) * (hi_.y() - lo_.y());
}

FrequencyDomain frequency_domain(const ChartSpec& chart, int per_edge) {
    validate_chart(chart);
    std::vector<EMValue> vals;
    const ValueWindow& w = chart.window;
    for (int k = 0; k < per_edge; ++k) vals.push_back(w.at(double(k) / per_edge, 0.0));
    for (int k = 0; k < per_edge; ++k) vals.push_back(w.at(1.0, double(k) / per_edge));
    for (int k = 0; k < per_edge; ++k) vals.push_back(w.at(1.0 - double(k) / per_edge, 1.0));
    for (int k = 0; k < per_edge; ++k) vals.push_back(w.at(0.0, 1.0 - double(k) / per_edge));
    std::vector<Eigen::Vector2d> poly(vals.size());
    parallel_for(vals.size(), 0, [&](std::size_t i) {
        FrequencyVector f = frequency_map(vals[i]);
        poly[i] = {f.omega1, f.omega2};
    });
    return FrequencyDomain(std::move(poly));
}

FrequencyDomain shrink_domain(const FrequencyDomain& domain, double gt) {
    if (gt < 0.0) throw ValidationError("shrink distance must be non-negative");
    FrequencyDomain out = domain;
    if (gt == 0.0) return out;
    double room = domain.inradius();
    out.erosion_ += gt;
    if (gt >= room) out.empty_ = true;
    return out;
}

double LabeledGrid::in_fraction() const {
    if (nodes.empty()) return 0.0;
    std::size_t k = 0;
    for (const auto& n : nodes) k += n.in ? 1 : 0;
    return double(k) / double(nodes.size());
}

LabeledGrid diophantine_set_in_chart(const ChartSpec& chart, const DiophantineParams& p, int n, int m, int jobs) {
    p.validate();
    if (n < 2 || m < 2) throw ValidationError("chart grid must be at least 2x2");
    FrequencyDomain shrunk = shrink_domain(frequency_domain(chart), p.shrink());
    LabeledGrid g;
    g.n = n;
    g.m = m;
    g.nodes.resize(std::size_t(n) * m);
    parallel_for(g.nodes.size(), jobs, [&](std::size_t k) {
        int i = int(k) / m, j = int(k) % m;
        LabeledNode& node = g.nodes[k];
        node.value = chart.window.at(double(i) / (n - 1), double(j) / (m - 1));
        FiberQuadrature fq(node.value);
        node.omega = fq.frequencies();
        node.action = {node.value.I, action_J(node.value)};
        node.in_domain = shrunk.contains(node.omega);
        node.verdict = is_diophantine(node.omega, p);
        node.in = node.in_domain && node.verdict.accepted;
    });
    return g;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ stream);
    h = splitmix(h ^ index);
    return double(h >> 11) * 0x1.0p-53;
}

MeasureEstimate measure_estimate(const FrequencyDomain& domain, const DiophantineParams& p, std::size_t samples,
                                 std::uint64_t seed, int jobs, std::vector<FrequencySample>* trace) {
    p.validate();
    if (samples < 1000) throw ValidationError("measure_estimate needs at least 1000 samples");
    FrequencyDomain shrunk = shrink_domain(domain, p.shrink());
    std::vector<FrequencySample> out(samples);
    const Eigen::Vector2d lo = domain.lower(), hi = domain.upper();
    parallel_for(samples, jobs, [&](std::size_t i) {
        Eigen::Vector2d w;
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt > 100000) throw NumericalError("rejection sampling of the frequency domain failed");
            std::uint64_t idx = (std::uint64_t(i) << 20) | attempt;
            w = {lo.x() + counter_uniform(seed, 0, idx) * (hi.x() - lo.x()),
                 lo.y() + counter_uniform(seed, 1, idx) * (hi.y() - lo.y())};
            if (domain.inside_polygon(w)) break;
        }
        DiophantineVerdict v = is_diophantine({w.x(), w.y()}, p);
        out[i] = {w.x(), w.y(), v.accepted && shrunk.contains(w), v.margin};
    });
    MeasureEstimate est;
    est.samples = samples;
    for (const auto& s : out) est.accepted += s.accepted ? 1 : 0;
    est.fraction = double(est.accepted) / double(samples);
    est.standard_error = std::sqrt(est.fraction * (1.0 - est.fraction) / double(samples));
    if (trace) *trace = std::move(out);
    return est;
}

}  // namespace torus_atlas
