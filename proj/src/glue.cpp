#include "torus_atlas/glue.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace torus_atlas {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double window_bump(const ValueWindow& w, const EMValue& v) {
    double si = (2.0 * v.I - (w.I0 + w.I1)) / (w.I1 - w.I0);
    double se = (2.0 * v.E - (w.E0 + w.E1)) / (w.E1 - w.E0);
    return bump(si) * bump(se);
}

Eigen::Vector2d gauge_shift(const Eigen::Matrix2d& G, const ActionPair& a) { return G * Eigen::Vector2d(a.J, a.I); }

// Sup distance from the sampled points of A to the surface B.
double one_sided_distance(const TorusEmbedding& A, const TorusEmbedding& B, const Eigen::Vector2d& shift, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
            AnglePair th{kTwoPi * i / samples, kTwoPi * j / samples};
            double d = 0.0;
            locate_on_torus(B, A.evaluate(th), {th.theta1 + shift[0], th.theta2 + shift[1]}, &d);
            worst = std::max(worst, d);
        }
    return worst;
}

}  // namespace

double bump(double s) {
    if (!(std::abs(s) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

PartitionOfUnity::PartitionOfUnity(std::vector<ChartSpec> cover, std::vector<ValueWindow> supports, ValueWindow region)
    : cover_(std::move(cover)), supports_(std::move(supports)), region_(region) {
    if (cover_.empty() || cover_.size() != supports_.size())
        throw ValidationError("partition needs one support per chart");
}

std::vector<double> PartitionOfUnity::raw(const EMValue& v) const {
    std::vector<double> r(supports_.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = window_bump(supports_[k], v);
    return r;
}

std::vector<double> PartitionOfUnity::weights(const EMValue& v) const {
    std::vector<double> r = raw(v);
    double sum = 0.0;
    for (double x : r) sum += x;
    if (!(sum > 0.0))
        throw DomainError(fmt::format("({:.17g}, {:.17g}) lies outside every bump support", v.I, v.E));
    for (double& x : r) x /= sum;
    return r;
}

std::vector<double> PartitionOfUnity::weights(const PhasePoint& x) const { return weights(em_map(x)); }

PartitionOfUnity build_partition(const std::vector<ChartSpec>& cover, const ValueWindow& region, double inset,
                                 int checks) {
    if (cover.empty()) throw ValidationError("empty cover");
    if (!(inset > 0.0 && inset < 0.5)) throw ValidationError("inset must lie in (0, 0.5)");
    if (!(region.I1 > region.I0 && region.E1 > region.E0)) throw ValidationError("region window is empty");
    std::vector<ValueWindow> supports;
    for (const ChartSpec& c : cover) {
        validate_chart(c);
        const ValueWindow& w = c.window;
        double di = inset * (w.I1 - w.I0), de = inset * (w.E1 - w.E0);
        supports.push_back({w.I0 + di, w.I1 - di, w.E0 + de, w.E1 - de});
    }
    PartitionOfUnity pu(cover, supports, region);
    for (int i = 0; i <= checks; ++i)
        for (int j = 0; j <= checks; ++j) {
            EMValue v = region.at(double(i) / checks, double(j) / checks);
            double sum = 0.0;
            for (double x : pu.raw(v)) sum += x;
            if (!(sum > 0.0))
                throw CoverageGap(fmt::format("no bump support reaches ({:.17g}, {:.17g})", v.I, v.E), v.I, v.E);
        }
    return pu;
}

TransitionMap overlap_translation(const ChartSpec& ci, const SolvedTorus& ti, const ChartSpec& cj,
                                  const SolvedTorus& tj, double lemma_tol, int samples) {
    TransitionMap tm;
    tm.i = ci.id;
    tm.j = cj.id;
    if (ti.value.I != tj.value.I || ti.value.E != tj.value.E)
        throw ValidationError("overlap_translation needs the same torus solved in both charts");
    if (ci.id == cj.id) return tm;
    ActionPair a{ti.value.I, action_J(ti.value)};
    Eigen::Vector2d si = gauge_shift(ci.gauge, a), sj = gauge_shift(cj.gauge, a);
    std::vector<Eigen::Vector2d> field;
    Eigen::Vector2d guess = Eigen::Vector2d::Zero();
    double dist_ij = 0.0;
    for (int p = 0; p < samples; ++p)
        for (int q = 0; q < samples; ++q) {
            AnglePair th{kTwoPi * p / samples, kTwoPi * q / samples};
            double d = 0.0;
            AnglePair tj_ang = locate_on_torus(
                tj.K, ti.K.evaluate(th),
                {th.theta1 - si[0] + sj[0] + guess[0], th.theta2 - si[1] + sj[1] + guess[1]}, &d);
            dist_ij = std::max(dist_ij, d);
            Eigen::Vector2d f(wrap_angle((tj_ang.theta1 - sj[0]) - (th.theta1 - si[0])),
                              wrap_angle((tj_ang.theta2 - sj[1]) - (th.theta2 - si[1])));
            if (!field.empty()) {
                // lift next to the first sample
                f[0] = field.front()[0] + wrap_angle(f[0] - field.front()[0]);
                f[1] = field.front()[1] + wrap_angle(f[1] - field.front()[1]);
            }
            field.push_back(f);
            if (field.size() == 1) guess = f;
        }
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& f : field) c += f;
    c /= double(field.size());
    for (const auto& f : field) tm.deviation = std::max(tm.deviation, (f - c).cwiseAbs().maxCoeff());
    tm.c = {c[0], c[1]};
    double dist_ji = one_sided_distance(tj.K, ti.K, si - sj - c, samples);
    tm.image_distance = std::max(dist_ij, dist_ji);
    if (tm.deviation > lemma_tol)
        throw OverlapMismatch(fmt::format(
            "charts {} and {} differ by more than a translation on ({:.6g}, {:.6g}): deviation {:.3e} > {:.1e}", ci.id,
            cj.id, ti.value.I, ti.value.E, tm.deviation, lemma_tol));
    return tm;
}

Vec6 GluedFiber::map(const AnglePair& u) const {
    Eigen::Vector2d s = gauge_shift(reference_gauge, action);
    return reference_torus.K.evaluate(
        {u.theta1 + s[0] - mean_translation.theta1, u.theta2 + s[1] - mean_translation.theta2});
}

GlobalConjugacy::GlobalConjugacy(PartitionOfUnity pu, std::vector<std::shared_ptr<const LocalConjugacy>> locals,
                                 double lemma_tol)
    : pu_(std::move(pu)), locals_(std::move(locals)), lemma_tol_(lemma_tol) {
    if (locals_.size() != pu_.cover().size()) throw ValidationError("one local conjugacy per chart of the cover");
    for (std::size_t k = 0; k < locals_.size(); ++k) {
        if (!locals_[k]) throw ValidationError("missing local conjugacy");
        if (locals_[k]->chart().id != pu_.cover()[k].id)
            throw ValidationError("local conjugacies must follow the order of the cover");
        const HamiltonianSpec& s = locals_[k]->spec();
        if (s.epsilon != spec().epsilon || s.perturbation != spec().perturbation)
            throw ValidationError("local conjugacies were built for different Hamiltonians");
    }
}

bool GlobalConjugacy::admits(const EMValue& v) const {
    if (!pu_.region().contains(v)) return false;
    std::vector<double> raw = pu_.raw(v);
    bool any = false;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k] <= 0.0) continue;
        any = true;
        if (!locals_[k]->admits(v)) return false;
    }
    return any;
}

GluedFiber GlobalConjugacy::fiber(const EMValue& v) const {
    if (!pu_.region().contains(v))
        throw DomainError(fmt::format("({:.17g}, {:.17g}) is outside the glued region", v.I, v.E));
    std::vector<double> w = pu_.weights(v);
    GluedFiber g;
    g.value = v;
    std::vector<std::size_t> used;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= 0.0) continue;
        if (!locals_[k]->admits(v))
            throw DomainError(fmt::format("({:.17g}, {:.17g}) is not Diophantine for chart {}; the conjugacy is only "
                                          "defined on Diophantine tori",
                                          v.I, v.E, locals_[k]->chart().id));
        used.push_back(k);
    }
    std::size_t ref = used.front();
    for (std::size_t k : used) {
        int id = locals_[k]->chart().id, rid = locals_[ref]->chart().id;
        if (w[k] > w[ref] || (w[k] == w[ref] && id < rid)) ref = k;
    }
    std::vector<SolvedTorus> tori;
    for (std::size_t k : used) tori.push_back(locals_[k]->torus_at(v, true));
    std::size_t ref_pos = std::size_t(std::find(used.begin(), used.end(), ref) - used.begin());
    g.reference = locals_[ref]->chart().id;
    g.reference_gauge = locals_[ref]->chart().gauge;
    g.omega = tori[ref_pos].omega;
    g.action = {v.I, action_J(v)};
    for (std::size_t p = 0; p < used.size(); ++p) {
        std::size_t k = used[p];
        g.charts.push_back(locals_[k]->chart().id);
        g.weights.push_back(w[k]);
        TransitionMap tm = overlap_translation(locals_[ref]->chart(), tori[ref_pos], locals_[k]->chart(), tori[p],
                                               lemma_tol_);
        g.mean_translation.theta1 += w[k] * tm.c.theta1;
        g.mean_translation.theta2 += w[k] * tm.c.theta2;
        g.transitions.push_back(tm);
    }
    g.reference_torus = std::move(tori[ref_pos]);
    g.integrable = integrable_embedding(v, g.reference_torus.K.n());
    return g;
}

GlobalConjugacy glue(std::vector<std::shared_ptr<const LocalConjugacy>> locals, const PartitionOfUnity& pu,
                     double lemma_tol) {
    return GlobalConjugacy(pu, std::move(locals), lemma_tol);
}

ConjugacyReport verify_global_conjugacy(const GlobalConjugacy& g, const std::vector<EMValue>& values, int points,
                                        double t_end, std::uint64_t seed, double h, int jobs) {
    if (points < 1 || !(t_end > 0.0)) throw ValidationError("verification needs points >= 1 and t_end > 0");
    ConjugacyReport rep;
    rep.fibers.resize(values.size());
    const HamiltonianSpec spec = g.spec();
    const int stride = std::max(1, int(std::lround(0.1 / h)));
    parallel_for(values.size(), jobs, [&](std::size_t f) {
        GluedFiber gf = g.fiber(values[f]);
        FiberDefect& fd = rep.fibers[f];
        fd.value = values[f];
        fd.reference = gf.reference;
        fd.mean_translation = gf.mean_translation;
        for (const auto& t : gf.transitions) fd.max_deviation = std::max(fd.max_deviation, t.deviation);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                AnglePair u{kTwoPi * i / 16, kTwoPi * j / 16};
                fd.identity_distance = std::max(fd.identity_distance, (gf.map(u) - gf.identity(u)).norm());
            }
        for (int p = 0; p < points; ++p) {
            std::uint64_t idx = (std::uint64_t(f) << 16) | std::uint64_t(p);
            AnglePair u0{kTwoPi * counter_uniform(seed, 6, idx), kTwoPi * counter_uniform(seed, 7, idx)};
            PhasePoint x0 = project(PhasePoint::from_vec(gf.map(u0)));
            Trajectory tr = integrate(x0, spec, t_end, h, {Scheme::Composition6, stride});
            for (std::size_t k = 0; k < tr.size(); ++k) {
                double t = tr.time[k];
                Vec6 y = gf.map({u0.theta1 + gf.omega.omega1 * t, u0.theta2 + gf.omega.omega2 * t});
                fd.defect = std::max(fd.defect, (tr.points[k].to_vec() - y).norm());
            }
        }
    });
    for (const auto& fd : rep.fibers) {
        rep.max_defect = std::max(rep.max_defect, fd.defect);
        rep.max_identity_distance = std::max(rep.max_identity_distance, fd.identity_distance);
    }
    return rep;
}

std::vector<EMValue> sample_glued_values(const GlobalConjugacy& g, int count, std::uint64_t seed) {
    std::vector<EMValue> out;
    const ValueWindow& r = g.partition().region();
    for (std::uint64_t k = 0; int(out.size()) < count && k < std::uint64_t(count) * 1000; ++k) {
        EMValue v = r.at(counter_uniform(seed, 4, k), counter_uniform(seed, 5, k));
        if (g.admits(v)) out.push_back(v);
    }
    return out;
}

}  // namespace torus_atlas
