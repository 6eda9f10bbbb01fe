#include "torus_atlas/monodromy.hpp"

#include "torus_atlas/action_angle.hpp"
#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) { return std::remainder(a, kTwoPi); }

EMValue lerp(const EMValue& a, const EMValue& b, double t) { return {a.I + t * (b.I - a.I), a.E + t * (b.E - a.E)}; }

struct Sample {
    double t;
    double theta;
};

}  // namespace

void LoopPath::validate(int samples_per_edge) const {
    if (vertices.size() < 4) throw ValidationError("a loop needs at least three distinct vertices");
    const EMValue &a = vertices.front(), &b = vertices.back();
    if (a.I != b.I || a.E != b.E) throw ValidationError("loop is not closed: the last vertex must repeat the first");
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
        for (int s = 0; s < samples_per_edge; ++s) {
            EMValue v = lerp(vertices[k], vertices[k + 1], double(s) / samples_per_edge);
            ValueClass c = classify(v);
            if (c != ValueClass::Regular)
                throw ValidationError(fmt::format("loop point ({:.17g}, {:.17g}) on edge {} is {}, not Regular", v.I,
                                                  v.E, k, to_string(c)));
        }
}

LoopPath LoopPath::reversed() const { return {std::vector<EMValue>(vertices.rbegin(), vertices.rend())}; }

LoopPath LoopPath::then(const LoopPath& other) const {
    if (vertices.empty() || other.vertices.empty()) throw ValidationError("cannot concatenate an empty loop");
    const EMValue &a = vertices.front(), &b = other.vertices.front();
    if (a.I != b.I || a.E != b.E) throw ValidationError("concatenated loops must share their base point");
    LoopPath out = *this;
    out.vertices.insert(out.vertices.end(), other.vertices.begin() + 1, other.vertices.end());
    return out;
}

LoopPath LoopPath::circle(const EMValue& center, double radius, int n, bool ccw, double phase) {
    if (n < 3 || !(radius > 0.0)) throw ValidationError("circle loop needs radius > 0 and at least 3 vertices");
    LoopPath lp;
    for (int k = 0; k < n; ++k) {
        double a = phase + (ccw ? 1.0 : -1.0) * kTwoPi * k / n;
        lp.vertices.push_back({center.I + radius * std::cos(a), center.E + radius * std::sin(a)});
    }
    lp.vertices.push_back(lp.vertices.front());
    return lp;
}

RotationReport continue_rotation(const LoopPath& loop, const RefinementParams& rp, int jobs) {
    loop.validate();
    if (!(rp.max_jump > 0.0 && rp.max_jump < std::numbers::pi) || rp.initial_per_edge < 1)
        throw ValidationError("refinement needs 0 < max_jump < pi and initial_per_edge >= 1");
    const std::size_t edges = loop.vertices.size() - 1;
    const int m = rp.initial_per_edge;
    if (edges * std::size_t(m) > rp.max_samples)
        throw RefinementBudgetError(fmt::format("{} initial samples exceed the budget of {}", edges * std::size_t(m),
                                                rp.max_samples));
    auto theta_at = [&](std::size_t e, double t) {
        return periods(lerp(loop.vertices[e], loop.vertices[e + 1], t)).theta;
    };

    std::vector<std::vector<Sample>> runs(edges);
    parallel_for(edges, jobs, [&](std::size_t e) {
        for (int s = 0; s <= m; ++s) runs[e].push_back({double(s) / m, theta_at(e, double(s) / m)});
    });

    RotationReport rep;
    for (std::size_t e = 0; e < edges; ++e) {
        std::vector<Sample>& r = runs[e];
        for (std::size_t k = 0; k + 1 < r.size();) {
            if (std::abs(wrap(r[k + 1].theta - r[k].theta)) < rp.max_jump) {
                ++k;
                continue;
            }
            double mid = 0.5 * (r[k].t + r[k + 1].t);
            if (rep.samples + r.size() > rp.max_samples || !(mid > r[k].t && mid < r[k + 1].t))
                throw RefinementBudgetError(fmt::format(
                    "rotation angle still jumps by {:.3g} near ({:.6g}, {:.6g}) after {} refinements; move the loop "
                    "away from the singular values",
                    wrap(r[k + 1].theta - r[k].theta), lerp(loop.vertices[e], loop.vertices[e + 1], mid).I,
                    lerp(loop.vertices[e], loop.vertices[e + 1], mid).E, rep.refinements));
            r.insert(r.begin() + std::ptrdiff_t(k) + 1, Sample{mid, theta_at(e, mid)});
            ++rep.refinements;
        }
        for (std::size_t k = 0; k + 1 < r.size(); ++k) {
            double d = wrap(r[k + 1].theta - r[k].theta);
            rep.delta_theta += d;
            rep.largest_jump = std::max(rep.largest_jump, std::abs(d));
        }
        rep.samples += r.size() - 1;
    }
    return rep;
}

MonodromyMatrix monodromy_matrix(const LoopPath& loop, const RefinementParams& rp, int jobs, RotationReport* report) {
    RotationReport rep = continue_rotation(loop, rp, jobs);
    double turns = rep.delta_theta / kTwoPi;
    double k = std::round(turns);
    if (std::abs(turns - k) > 1e-6)
        throw NumericalError(fmt::format("rotation change {:.17g} is not a multiple of 2 pi", rep.delta_theta));
    if (report) *report = rep;
    MonodromyMatrix M;
    M << 1, static_cast<long long>(k), 0, 1;
    return M;
}

int winding_number(const LoopPath& loop, const EMValue& c) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < loop.vertices.size(); ++k) {
        double a0 = std::atan2(loop.vertices[k].E - c.E, loop.vertices[k].I - c.I);
        double a1 = std::atan2(loop.vertices[k + 1].E - c.E, loop.vertices[k + 1].I - c.I);
        total += wrap(a1 - a0);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace torus_atlas
