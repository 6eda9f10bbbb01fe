// One line per acceptance criterion: "AC<n> PASS|FAIL <title>: <evidence>".
// Exit status is the number of failed criteria.

#include "torus_atlas/action_angle.hpp"
#include "torus_atlas/cli.hpp"
#include "torus_atlas/diophantine.hpp"
#include "torus_atlas/errors.hpp"
#include "torus_atlas/freq_verify.hpp"
#include "torus_atlas/glue.hpp"
#include "torus_atlas/kam.hpp"
#include "torus_atlas/monodromy.hpp"
#include "torus_atlas/parallel.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace torus_atlas;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Outcome {
    bool pass = true;
    std::string evidence;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            evidence += (evidence.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { evidence += (evidence.empty() ? "" : "; ") + s; }
};

ChartSpec chart(int id) {
    ChartSpec c;
    c.id = id;
    if (id == 0) {
        c.window = {0.15, 0.35, 0.3, 0.7};
    } else {
        c.window = {0.25, 0.45, 0.3, 0.7};
        c.gauge << 0.05, 0.02, 0.02, -0.03;
    }
    return c;
}

const ValueWindow kRegion{0.2, 0.4, 0.35, 0.65};

// --- 1 ---------------------------------------------------------------------
Outcome frequency_oracle() {
    Outcome o;
    std::vector<EMValue> values;
    for (std::uint64_t k = 0; values.size() < 20; ++k) {
        EMValue v{0.05 + 0.95 * counter_uniform(2024, 0, k), -0.9 + 2.4 * counter_uniform(2024, 1, k)};
        if (classify(v) != ValueClass::Regular) continue;
        if (v.E < boundary_energy(v.I) + 0.05 || std::hypot(v.I, v.E - 1.0) < 0.1) continue;
        values.push_back(v);
    }
    double worst = 0.0;
    EMValue at;
    for (const auto& v : values) {
        FrequencyVector q = frequency_map(v);
        TrajectoryFrequencies tf = trajectory_frequencies(chart_point(v, {0.0, 0.0}), {}, 500.0, 0.01, 5);
        double e = std::max(std::abs(tf.omega.omega1 - q.omega1) / std::abs(q.omega1),
                            std::abs(tf.omega.omega2 - q.omega2) / std::abs(q.omega2));
        if (e > worst) {
            worst = e;
            at = v;
        }
    }
    o.require(worst <= 1e-6, "relative error above 1e-6");
    o.note(fmt::format("max relative error {:.2e} over {} values (worst at I={:.4f}, E={:.4f})", worst, values.size(),
                       at.I, at.E));
    return o;
}

// --- 2 ---------------------------------------------------------------------
Outcome action_period_duality() {
    Outcome o;
    const EMValue pts[] = {{0.1, -0.5}, {0.2, 0.5},  {0.35, 0.1}, {0.5, 0.9},  {0.7, 1.2},
                           {0.3, 1.4},  {0.05, 0.3}, {1.0, 2.0},  {-0.4, 0.6}, {0.15, 1.05}};
    const double h = 1e-5;
    double worst = 0.0;
    for (const auto& v : pts) {
        Periods P = periods(v);
        double dJdE = (action_J({v.I, v.E + h}) - action_J({v.I, v.E - h})) / (2 * h);
        double dJdI = (action_J({v.I + h, v.E}) - action_J({v.I - h, v.E})) / (2 * h);
        worst = std::max({worst, std::abs(dJdE - P.T / kTwoPi), std::abs(dJdI + P.theta / kTwoPi)});
    }
    o.require(worst <= 1e-6, "finite-difference mismatch above 1e-6");
    o.note(fmt::format("max |dJ/dE - T/2pi|, |dJ/dI + Theta/2pi| = {:.2e} at 10 values", worst));
    return o;
}

// --- 3 ---------------------------------------------------------------------
Outcome nondegeneracy() {
    Outcome o;
    NondegeneracyReport r = nondegeneracy_scan({0.05, 0.6, -0.5, 0.8}, 40, 40, 1e-4, 0, true);
    o.require(r.min_abs_det > 0.0, "zero determinant");
    o.note(fmt::format("min |det dω/da| = {:.4f} at (I={:.4f}, E={:.4f}), max {:.4f}; {} regular nodes, {} nodes "
                       "below the boundary curve skipped",
                       r.min_abs_det, r.argmin.I, r.argmin.E, r.max_abs_det, r.rows.size(), r.skipped));
    return o;
}

// --- 4 ---------------------------------------------------------------------
Outcome monodromy() {
    Outcome o;
    MonodromyMatrix one, id;
    one << 1, 1, 0, 1;
    id.setIdentity();
    LoopPath a = LoopPath::circle({0.0, 1.0}, 0.3, 16);
    RotationReport rep;
    MonodromyMatrix M = monodromy_matrix(a, {}, 0, &rep);
    o.require(std::abs(rep.delta_theta - kTwoPi) <= 1e-6, "ΔΘ differs from 2π");
    o.require(M == one, "matrix is not [[1,1],[0,1]]");
    MonodromyMatrix C = monodromy_matrix(LoopPath::circle({0.35, 0.4}, 0.15, 12));
    o.require(C == id, "contractible loop is not the identity");
    MonodromyMatrix C2 = monodromy_matrix(LoopPath::circle({0.0, 1.6}, 0.3, 16));
    o.require(C2 == id, "contractible loop across the axis is not the identity");
    MonodromyMatrix A2 = monodromy_matrix(a.then(a));
    o.require(A2 == M * M, "concatenation does not multiply");
    MonodromyMatrix AR = monodromy_matrix(a.then(a.reversed()));
    o.require(AR == id, "loop followed by its reverse is not the identity");
    o.note(fmt::format("ΔΘ/2π = {:.12f}, M = [[{},{}],[{},{}]], M(γγ) = [[{},{}],[{},{}]], contractible → identity",
                       rep.delta_theta / kTwoPi, M(0, 0), M(0, 1), M(1, 0), M(1, 1), A2(0, 0), A2(0, 1), A2(1, 0),
                       A2(1, 1)));
    return o;
}

// --- 5 ---------------------------------------------------------------------
Outcome diophantine() {
    Outcome o;
    // inclusion in gamma and ray scaling on a lattice of frequencies
    int inclusion_bad = 0, ray_bad = 0, tested = 0;
    double scale_err = 0.0;
    const double gammas[] = {1e-1, 1e-2, 1e-3};
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j) {
            FrequencyVector w{1.0 + 0.02 * i + 1e-3 * std::sqrt(2.0), 0.5 + 0.02 * j + 1e-3 * std::sqrt(3.0)};
            bool prev = false;
            for (double g : gammas) {
                bool acc = is_diophantine(w, {g, 1.5, 200}).accepted;
                if (prev && !acc) ++inclusion_bad;
                prev = acc;
            }
            DiophantineParams p{1e-3, 1.5, 200};
            if (is_diophantine(w, p).accepted && !ray_check(w, p, {1.5, 2.0, 10.0})) ++ray_bad;
            DiophantineVerdict base = is_diophantine(w, p);
            for (double s : {1.5, 2.0, 10.0}) {
                DiophantineVerdict d = is_diophantine({s * w.omega1, s * w.omega2}, p);
                // the minimum is a product of |k.w| and |k|^tau; cancellation in k.w costs ~|k| ulps
                double ulp_scale = 2.2e-16 * s * (w.omega1 + w.omega2) * std::pow(p.k_max, 1.0 + p.tau);
                double rel = std::abs((d.margin + p.gamma) - s * (base.margin + p.gamma)) / ulp_scale;
                scale_err = std::max(scale_err, rel);
                if (rel > 8.0) ++ray_bad;
            }
            ++tested;
        }
    o.require(inclusion_bad == 0, "set inclusion violated");
    o.require(ray_bad == 0, "margin does not scale along rays");

    ChartSpec c = chart(0);
    FrequencyDomain dom = frequency_domain(c);
    std::vector<double> grid_in, meas;
    for (double g : gammas) {
        DiophantineParams p{g, 1.5, 200};
        grid_in.push_back(diophantine_set_in_chart(c, p, 20, 20).in_fraction());
        meas.push_back(measure_estimate(dom, p, 4000, 7).fraction);
    }
    bool mono = grid_in[0] <= grid_in[1] && grid_in[1] <= grid_in[2] && meas[0] <= meas[1] && meas[1] <= meas[2];
    o.require(mono, "in-fraction is not monotone in gamma");
    o.require(meas[2] > 0.9, "in-fraction does not approach 1");
    o.note(fmt::format("{} frequencies: inclusion and ray scaling hold (scaling error {:.2f} in units of eps s |w| K^(1+tau)); grid in-fraction {:.3f} / {:.3f} / {:.3f}, "
                       "measure {:.4f} / {:.4f} / {:.4f} for γ = 1e-1 / 1e-2 / 1e-3 (seed 7)",
                       tested, scale_err, grid_in[0], grid_in[1], grid_in[2], meas[0], meas[1], meas[2]));
    return o;
}

// --- 6 ---------------------------------------------------------------------
Outcome local_kam() {
    Outcome o;
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    KamConfig cfg;
    cfg.N = 64;
    LocalConjugacy lc = build_local_conjugacy(chart(0), spec, {1e-3, 1.5, 200}, 10, 10, cfg);
    std::vector<const SolvedTorus*> tori;
    for (const auto& t : lc.tori())
        if (t) tori.push_back(&*t);
    std::size_t dio = 0;
    for (const auto& nd : lc.grid().nodes) dio += nd.in ? 1 : 0;
    o.require(tori.size() == dio && dio > 0, "not every Diophantine grid torus solved");

    double max_res = 0.0, max_val = 0.0, worst_c = 0.0;
    std::vector<double> val(tori.size());
    parallel_for(tori.size(), 0, [&](std::size_t k) { val[k] = validate_torus(*tori[k], spec, 100.0, 2); });
    for (std::size_t k = 0; k < tori.size(); ++k) {
        max_res = std::max(max_res, tori[k]->residual);
        max_val = std::max(max_val, val[k]);
        const auto& h = tori[k]->residual_history;
        // quadratic contraction while above the round-off floor
        for (std::size_t i = 0; i + 1 < h.size(); ++i)
            if (h[i + 1] > 1e-11) worst_c = std::max(worst_c, h[i + 1] / (h[i] * h[i]));
    }
    o.require(max_res <= 1e-10, "residual above 1e-10");
    o.require(max_val <= 1e-6, "flow validation above 1e-6");
    o.require(worst_c <= 10.0, "Newton contraction is not quadratic");

    GuardCalibration g = calibrate_guard({0.25, 0.5}, Perturbation::TiltedGravity, cfg);
    KamConfig guarded = cfg;
    guarded.smallness_guard = g.guard;
    bool raised = false;
    try {
        solve_torus({0.25, 0.5}, {g.failing, Perturbation::TiltedGravity}, guarded);
    } catch (const SmallnessViolated&) {
        raised = true;
    }
    o.require(raised, "no SmallnessViolated above the guard");
    std::string natural;
    try {
        solve_torus({0.25, 0.5}, {g.failing, Perturbation::TiltedGravity}, cfg);
        natural = "solves";
    } catch (const GridTooCoarse&) {
        natural = "GridTooCoarse";
    } catch (const SmallnessViolated&) {
        natural = "SmallnessViolated";
    }
    o.note(fmt::format("{} / {} Diophantine tori of the 10x10 grid solved at N = 64, max residual {:.2e}, max flow "
                       "distance {:.2e} at t = 100, max r_(k+1)/r_k^2 = {:.3f}; guard ε* = {:.4g} ({} solves), "
                       "ε = {:.4g} raises SmallnessViolated (unguarded solver: {})",
                       tori.size(), dio, max_res, max_val, worst_c, g.guard, g.solves, g.failing, natural));
    return o;
}

// --- 7 ---------------------------------------------------------------------
Outcome overlap() {
    Outcome o;
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    DiophantineParams p{1e-3, 1.5, 200};
    KamConfig cfg;
    LocalConjugacy a = build_local_conjugacy(chart(0), spec, p, 9, 9, cfg);
    LocalConjugacy b = build_local_conjugacy(chart(1), spec, p, 9, 9, cfg);
    std::vector<EMValue> shared;
    for (const auto& t : a.tori())
        if (t && b.admits(t->value)) shared.push_back(t->value);
    o.require(!shared.empty(), "no shared Diophantine torus");
    double dev = 0.0, mag = 0.0, img = 0.0;
    for (const auto& v : shared) {
        TransitionMap tm = overlap_translation(a.chart(), a.torus_at(v), b.chart(), b.torus_at(v));
        dev = std::max(dev, tm.deviation);
        mag = std::max(mag, std::hypot(tm.c.theta1, tm.c.theta2));
        img = std::max(img, tm.image_distance);
    }
    o.require(dev <= 1e-6, "transition deviates from a translation");
    o.require(mag <= 1e-3, "translation larger than 1e-3");
    o.note(fmt::format("{} shared tori: max deviation {:.2e}, max |c| = {:.2e}, image distance {:.2e}", shared.size(),
                       dev, mag, img));
    return o;
}

// --- 8 ---------------------------------------------------------------------
Outcome partition() {
    Outcome o;
    std::vector<ChartSpec> cover = {chart(0), chart(1)};
    PartitionOfUnity pu = build_partition(cover, kRegion);
    double sum_err = 0.0, lo = 1.0, hi = 0.0;
    int support_bad = 0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        EMValue v = kRegion.at(counter_uniform(99, 0, k), counter_uniform(99, 1, k));
        std::vector<double> w = pu.weights(v);
        double s = 0.0;
        for (double x : w) {
            s += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        sum_err = std::max(sum_err, std::abs(s - 1.0));
        // compact support: zero outside each support window, on a wider box
        EMValue u{0.0 + 0.7 * counter_uniform(99, 2, k), 0.1 + 0.8 * counter_uniform(99, 3, k)};
        std::vector<double> r = pu.raw(u);
        for (std::size_t j = 0; j < r.size(); ++j) {
            const ValueWindow& s_j = pu.supports()[j];
            bool inside = u.I > s_j.I0 && u.I < s_j.I1 && u.E > s_j.E0 && u.E < s_j.E1;
            if (!inside && r[j] != 0.0) ++support_bad;
            // exp(-1/(1-s^2)) underflows in a thin band at the edge, so test positivity away from it
            double mI = 0.05 * (s_j.I1 - s_j.I0), mE = 0.05 * (s_j.E1 - s_j.E0);
            bool deep = u.I > s_j.I0 + mI && u.I < s_j.I1 - mI && u.E > s_j.E0 + mE && u.E < s_j.E1 - mE;
            if (deep && !(r[j] > 0.0)) ++support_bad;
        }
    }
    // fiber constancy: weights of points on one torus
    double fiber_spread = 0.0;
    for (int k = 0; k < 20; ++k) {
        EMValue v = kRegion.at(counter_uniform(5, 0, k), counter_uniform(5, 1, k));
        std::vector<double> w0 = pu.weights(v);
        for (int j = 0; j < 5; ++j) {
            std::vector<double> w = pu.weights(chart_point(v, {1.3 * j, 0.7 * j + 0.2}));
            for (std::size_t c = 0; c < w.size(); ++c) fiber_spread = std::max(fiber_spread, std::abs(w[c] - w0[c]));
        }
    }
    o.require(sum_err <= 1e-12, "weights do not sum to 1");
    o.require(lo >= 0.0 && hi <= 1.0, "weight outside [0,1]");
    o.require(support_bad == 0, "support is not the inset window");
    o.require(fiber_spread <= 1e-12, "weights vary along a fiber");
    o.note(fmt::format("10^4 points: max |Σξ - 1| = {:.1e}, ξ ∈ [{:.3g}, {:.3g}], support violations {}, fiber spread "
                       "{:.1e}",
                       sum_err, lo, hi, support_bad, fiber_spread));
    return o;
}

// --- 9 ---------------------------------------------------------------------
struct GlueRun {
    ConjugacyReport rep;
};

GlueRun glue_at(double eps) {
    HamiltonianSpec spec{eps, Perturbation::TiltedGravity};
    DiophantineParams p{1e-3, 1.5, 200};
    std::vector<ChartSpec> cover = {chart(0), chart(1)};
    std::vector<std::shared_ptr<const LocalConjugacy>> locals;
    for (const auto& c : cover)
        locals.push_back(std::make_shared<const LocalConjugacy>(build_local_conjugacy(c, spec, p, 6, 6, KamConfig{})));
    GlobalConjugacy g = glue(locals, build_partition(cover, kRegion));
    std::vector<EMValue> values = sample_glued_values(g, 5, 1);
    if (values.size() < 5) throw DomainError("fewer than 5 admitted values");
    return {verify_global_conjugacy(g, values, 4, 50.0, 1)};
}

Outcome end_to_end() {
    Outcome o;
    std::map<double, GlueRun> runs;
    for (double eps : {0.0, 1e-4, 5e-4, 1e-3}) runs[eps] = glue_at(eps);
    const ConjugacyReport& main = runs[1e-3].rep;
    o.require(main.fibers.size() == 5, "not 5 fibers");
    o.require(main.max_defect <= 1e-5, "flow-commutation defect above 1e-5");
    double rmin = 1e300, rmax = 0.0, dmax = 0.0;
    std::string ratios;
    for (double eps : {1e-4, 5e-4, 1e-3}) {
        double r = runs[eps].rep.max_identity_distance / eps;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        dmax = std::max(dmax, runs[eps].rep.max_defect / eps);
        ratios += fmt::format("{}{:.3f}", ratios.empty() ? "" : " / ", r);
    }
    o.require(rmax <= 2.0 * rmin, "|Φ - id| / ε is not bounded across ε");
    o.require(dmax <= 1e-3, "defect / ε not bounded");
    const ConjugacyReport& zero = runs[0.0].rep;
    o.require(zero.max_identity_distance <= 1e-7 && zero.max_defect <= 1e-7, "ε = 0 is not the identity");
    o.note(fmt::format("ε = 1e-3: max defect {:.2e} over 5 tori x 4 orbits to t = 50; max defect/ε {:.2e}; sup|Φ - id|/ε "
                       "= {} for ε = 1e-4 / 5e-4 / 1e-3; ε = 0: sup|Φ - id| = {:.1e}, defect {:.1e}",
                       main.max_defect, dmax, ratios, zero.max_identity_distance, zero.max_defect));
    return o;
}

// --- 10 --------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream is(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        files[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return files;
}

Outcome determinism() {
    Outcome o;
    fs::path root = fs::temp_directory_path() / "torus_atlas_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    fs::path cfg = root / "config.json";
    std::ofstream(cfg) << R"({
  "schema_version": 1,
  "bifurcation": {"n": 41, "m": 41},
  "freqmap": {"n": 10, "m": 10},
  "diophantine": {"n": 8, "m": 8, "samples": 1000, "gamma_sweep": [0.01]},
  "monodromy": {},
  "solve-tori": {"n": 4, "m": 4, "validate": {"t_end": 10, "samples": 1}},
  "glue": {"n": 4, "m": 4, "verify": {"fibers": 2, "points": 2, "t_end": 5}},
  "verify-freq": {"count": 2, "t_end": 250}
})";
    const char* commands[] = {"bifurcation", "freqmap", "diophantine", "monodromy", "solve-tori", "glue", "verify-freq"};
    int compared = 0;
    for (const char* c : commands) {
        std::vector<std::map<std::string, std::string>> outs;
        for (const char* jobs : {"1", "2", "1"}) {
            fs::path out = root / fmt::format("run_{}", outs.size());
            std::ostringstream so, se;
            int code = cli::run({c, "--config", cfg.string(), "--out", out.string(), "--jobs", jobs, "--quiet"}, so, se);
            o.require(code == 0, fmt::format("{} exited with {}: {}", c, code, se.str()));
            outs.push_back(snapshot(out / c));
        }
        o.require(!outs[0].empty(), fmt::format("{} wrote nothing", c));
        for (std::size_t k = 1; k < outs.size(); ++k)
            o.require(outs[k] == outs[0], fmt::format("{} outputs differ between runs", c));
        compared += int(outs[0].size());
    }
    fs::remove_all(root);
    o.note(fmt::format("7 commands x 3 runs (jobs 1, 2, 1): {} files byte-identical", compared));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "frequency-map oracle agreement", 120, frequency_oracle},
        {2, "action-period duality", 10, action_period_duality},
        {3, "nondegeneracy", 60, nondegeneracy},
        {4, "monodromy", 60, monodromy},
        {5, "Diophantine structure", 60, diophantine},
        {6, "local KAM solver", 600, local_kam},
        {7, "overlap translation", 120, overlap},
        {8, "partition of unity", 10, partition},
        {9, "glued conjugacy end to end", 600, end_to_end},
        {10, "determinism", 600, determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note(fmt::format("exception: {}", e.what()));
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) o.require(false, fmt::format("runtime {:.1f} s over the {:.0f} s budget", secs, c.budget_s));
        failed += o.pass ? 0 : 1;
        fmt::print("AC{} {} {}: {} ({:.1f} s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.evidence, secs);
        std::fflush(stdout);
    }
    return failed;
}
