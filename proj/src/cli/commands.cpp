#include "cli/cli_internal.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/freq_verify.hpp"
#include "torus_atlas/glue.hpp"
#include "torus_atlas/monodromy.hpp"
#include "torus_atlas/parallel.hpp"
#include "torus_atlas/torus_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <memory>

namespace torus_atlas::cli {

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::string row(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) {
        if (!s.empty()) s += ',';
        s += c;
    }
    return s + '\n';
}

std::string d(double v) { return fmt_double(v); }

std::uint64_t resolve_seed(Context& c, Block& b) {
    std::uint64_t s = b.u64("seed", 1);
    if (c.seed_given) {
        s = c.seed;
        b.effective()["seed"] = s;
    }
    c.seed = s;
    return s;
}

ChartSpec default_chart(int k) {
    ChartSpec c;
    c.id = k;
    if (k == 0) {
        c.window = {0.15, 0.35, 0.3, 0.7};
    } else {
        c.window = {0.25, 0.45, 0.3, 0.7};
        c.gauge << 0.05, 0.02, 0.02, -0.03;
    }
    return c;
}

std::vector<ChartSpec> read_charts(Block& b, Json& eff, int defaults) {
    std::vector<ChartSpec> out;
    auto blocks = b.children("charts");
    Json arr = Json::array();
    if (blocks.empty()) {
        for (int k = 0; k < defaults; ++k) {
            out.push_back(default_chart(k));
            arr.push_back(chart_json(out.back()));
        }
    } else {
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            out.push_back(read_chart(blocks[k], default_chart(int(k))));
            arr.push_back(blocks[k].effective());
        }
    }
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t c = a + 1; c < out.size(); ++c)
            if (out[a].id == out[c].id) throw ConfigError(fmt::format("duplicate chart id {}", out[a].id));
    eff["charts"] = arr;
    return out;
}

ValueWindow read_window(Block& b, const std::string& key, const ValueWindow& def, Json& eff) {
    Block w = b.child(key);
    auto I = w.range("I", {def.I0, def.I1});
    auto E = w.range("E", {def.E0, def.E1});
    w.finish();
    eff[key] = w.effective();
    return {I.first, I.second, E.first, E.second};
}

HamiltonianSpec read_ham_block(Block& b, const HamiltonianSpec& def, Json& eff) {
    Block h = b.child("hamiltonian");
    HamiltonianSpec s = read_hamiltonian(h, def);
    h.finish();
    eff["hamiltonian"] = h.effective();
    return s;
}

DiophantineParams read_dio_block(Block& b, Json& eff) {
    Block h = b.child("diophantine");
    DiophantineParams p = read_diophantine(h, DiophantineParams{});
    h.finish();
    eff["diophantine"] = h.effective();
    return p;
}

KamConfig read_kam_block(Block& b, Json& eff) {
    Block h = b.child("kam");
    KamConfig k = read_kam(h);
    eff["kam"] = h.effective();
    return k;
}

void positive(int v, const char* what) {
    if (v < 1) throw ConfigError(fmt::format("{} must be positive", what));
}

Json value_json(const EMValue& v) { return {{"I", v.I}, {"E", v.E}}; }

}  // namespace

int cmd_bifurcation(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    ValueWindow win = read_window(b, "window", {-1.5, 1.5, -1.1, 1.5}, b.effective());
    int n = b.integer("n", 121), m = b.integer("m", 121);
    int nb = b.integer("boundary_samples", 200);
    double tol = b.number("tol", kClassifyTol);
    b.finish();
    positive(n, "n");
    positive(m, "m");
    positive(nb, "boundary_samples");

    std::vector<ValueClass> cls(std::size_t(n) * m);
    parallel_for(cls.size(), ctx.jobs, [&](std::size_t k) {
        int i = int(k) / m, j = int(k) % m;
        EMValue v = win.at(n > 1 ? double(i) / (n - 1) : 0.5, m > 1 ? double(j) / (m - 1) : 0.5);
        cls[k] = classify(v, tol);
    });
    std::string csv = row({"I", "E", "class"});
    std::map<std::string, int> counts;
    for (std::size_t k = 0; k < cls.size(); ++k) {
        int i = int(k) / m, j = int(k) % m;
        EMValue v = win.at(n > 1 ? double(i) / (n - 1) : 0.5, m > 1 ? double(j) / (m - 1) : 0.5);
        std::string c = to_string(cls[k]);
        ++counts[c];
        csv += row({d(v.I), d(v.E), c});
    }
    write_text(ctx, "bifurcation.csv", csv);

    std::string bc = row({"z_star", "I", "E"});
    for (int k = 1; k <= nb; ++k) {
        double z = -1.0 + double(k) / (nb + 1);
        EMValue p = boundary_point(z);
        bc += row({d(z), d(-p.I), d(p.E)});
        bc += row({d(z), d(p.I), d(p.E)});
    }
    write_text(ctx, "boundary.csv", bc);

    Json summary = {{"grid", {n, m}}, {"counts", counts}};
    write_json(ctx, "bifurcation.json", summary);
    ctx.note(fmt::format("bifurcation: {} grid values classified", cls.size()));
    write_manifest(ctx, b.effective(), {"bifurcation.csv", "boundary.csv", "bifurcation.json"});
    return 0;
}

int cmd_freqmap(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    ValueWindow win = read_window(b, "window", {0.05, 0.6, -0.5, 0.8}, b.effective());
    int n = b.integer("n", 40), m = b.integer("m", 40);
    double h = b.number("h", 1e-4);
    bool skip = b.boolean("skip_nonregular", true);
    b.finish();
    positive(n, "n");
    positive(m, "m");

    NondegeneracyReport rep = nondegeneracy_scan(win, n, m, h, ctx.jobs, skip);
    std::string csv = row({"I", "E", "J", "T", "Theta", "omega1", "omega2", "detJac"});
    for (const auto& r : rep.rows)
        csv += row({d(r.I), d(r.E), d(r.J), d(r.T), d(r.Theta), d(r.omega1), d(r.omega2), d(r.detJac)});
    write_text(ctx, "freqmap.csv", csv);
    Json nd = {{"grid", {n, m}},
               {"min_abs_det", rep.min_abs_det},
               {"argmin", value_json(rep.argmin)},
               {"max_abs_det", rep.max_abs_det},
               {"regular_nodes", rep.rows.size()},
               {"skipped_nodes", rep.skipped},
               {"nondegenerate", rep.min_abs_det > 0.0}};
    write_json(ctx, "nondegeneracy.json", nd);
    ctx.note(fmt::format("freqmap: {} rows, min |det| = {:.6g}", rep.rows.size(), rep.min_abs_det));
    write_manifest(ctx, b.effective(), {"freqmap.csv", "nondegeneracy.json"});
    return 0;
}

int cmd_diophantine(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    Json& eff = b.effective();
    Block cb = b.child("chart");
    ChartSpec chart = read_chart(cb, default_chart(0));
    eff["chart"] = cb.effective();
    DiophantineParams p = read_dio_block(b, eff);
    int n = b.integer("n", 20), m = b.integer("m", 20);
    int samples = b.integer("samples", 4000);
    std::vector<double> gammas = b.numbers("gamma_sweep", {1e-1, 1e-2, 1e-3});
    std::uint64_t seed = resolve_seed(ctx, b);
    b.finish();
    positive(n, "n");
    positive(m, "m");
    if (samples < 1000) throw ConfigError("samples must be at least 1000");

    LabeledGrid grid = diophantine_set_in_chart(chart, p, n, m, ctx.jobs);
    std::string csv = row({"I", "E", "J", "omega1", "omega2", "in_domain", "accepted", "margin", "k1", "k2", "in"});
    for (const auto& nd : grid.nodes)
        csv += row({d(nd.value.I), d(nd.value.E), d(nd.action.J), d(nd.omega.omega1), d(nd.omega.omega2),
                    nd.in_domain ? "1" : "0", nd.verdict.accepted ? "1" : "0", d(nd.verdict.margin),
                    std::to_string(nd.verdict.k1), std::to_string(nd.verdict.k2), nd.in ? "1" : "0"});
    write_text(ctx, "diophantine_grid.csv", csv);

    FrequencyDomain dom = frequency_domain(chart);
    std::vector<FrequencySample> trace;
    MeasureEstimate est = measure_estimate(dom, p, std::size_t(samples), seed, ctx.jobs, &trace);
    std::string sc = row({"omega1", "omega2", "accepted", "margin"});
    for (const auto& s : trace) sc += row({d(s.omega1), d(s.omega2), s.accepted ? "1" : "0", d(s.margin)});
    write_text(ctx, "diophantine_samples.csv", sc);

    Json sweep = Json::array();
    for (double g : gammas) {
        DiophantineParams q = p;
        q.gamma = g;
        q.gamma_tilde = p.gamma_tilde < 0.0 ? -1.0 : p.gamma_tilde;
        q.validate();
        LabeledGrid lg = diophantine_set_in_chart(chart, q, n, m, ctx.jobs);
        MeasureEstimate me = measure_estimate(dom, q, std::size_t(samples), seed, ctx.jobs);
        sweep.push_back({{"gamma", g},
                         {"grid_in_fraction", lg.in_fraction()},
                         {"measure_fraction", me.fraction},
                         {"standard_error", me.standard_error}});
    }
    Json summary = {{"chart", chart_json(chart)},
                    {"grid", {n, m}},
                    {"grid_in_fraction", grid.in_fraction()},
                    {"measure", {{"fraction", est.fraction},
                                 {"standard_error", est.standard_error},
                                 {"samples", est.samples},
                                 {"accepted", est.accepted}}},
                    {"domain_area", dom.area()},
                    {"gamma_sweep", sweep}};
    write_json(ctx, "diophantine.json", summary);
    ctx.note(fmt::format("diophantine: grid in-fraction {:.4f}, measure {:.4f} +- {:.4f}", grid.in_fraction(),
                         est.fraction, est.standard_error));
    write_manifest(ctx, eff, {"diophantine_grid.csv", "diophantine_samples.csv", "diophantine.json"});
    return 0;
}

int cmd_monodromy(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    Json& eff = b.effective();
    Block lb = b.child("loop");
    LoopPath loop;
    if (lb.has("points")) {
        const Json& pts = lb.raw("points");
        if (!pts.is_array()) throw ConfigError("monodromy.loop.points must be an array of [I, E] pairs");
        for (const auto& q : pts) {
            if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number())
                throw ConfigError("monodromy.loop.points must be an array of [I, E] pairs");
            loop.vertices.push_back({q[0].get<double>(), q[1].get<double>()});
        }
        lb.effective()["points"] = pts;
        lb.finish();
    } else {
        auto c = lb.numbers("center", {0.0, 1.0});
        double r = lb.number("radius", 0.3);
        int nv = lb.integer("vertices", 16);
        bool ccw = lb.boolean("counterclockwise", true);
        int turns = lb.integer("turns", 1);
        lb.finish();
        if (c.size() != 2) throw ConfigError("monodromy.loop.center must be [I, E]");
        if (!(r > 0.0)) throw ConfigError("monodromy.loop.radius must be positive");
        if (nv < 3) throw ConfigError("monodromy.loop.vertices must be at least 3");
        if (turns < 1) throw ConfigError("monodromy.loop.turns must be positive");
        LoopPath one = LoopPath::circle({c[0], c[1]}, r, nv, ccw);
        loop = one;
        for (int t = 1; t < turns; ++t) loop = loop.then(one);
    }
    eff["loop"] = lb.effective();
    Block rb = b.child("refinement");
    RefinementParams rp;
    rp.max_jump = rb.number("max_jump", rp.max_jump);
    rp.initial_per_edge = rb.integer("initial_per_edge", rp.initial_per_edge);
    rp.max_samples = std::size_t(rb.u64("max_samples", rp.max_samples));
    rb.finish();
    eff["refinement"] = rb.effective();
    b.finish();

    RotationReport rep;
    MonodromyMatrix M = monodromy_matrix(loop, rp, ctx.jobs, &rep);
    Json out = {{"matrix", {{M(0, 0), M(0, 1)}, {M(1, 0), M(1, 1)}}},
                {"delta_theta", rep.delta_theta},
                {"delta_theta_over_2pi", rep.delta_theta / kTwoPi},
                {"winding_number", winding_number(loop)},
                {"samples", rep.samples},
                {"refinements", rep.refinements},
                {"largest_jump", rep.largest_jump},
                {"loop_vertices", loop.vertices.size()}};
    write_json(ctx, "monodromy.json", out);
    ctx.note(fmt::format("monodromy: [[{}, {}], [{}, {}]]", M(0, 0), M(0, 1), M(1, 0), M(1, 1)));
    write_manifest(ctx, eff, {"monodromy.json"});
    return 0;
}

int cmd_solve_tori(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    Json& eff = b.effective();
    std::vector<ChartSpec> charts = read_charts(b, eff, 1);
    HamiltonianSpec spec = read_ham_block(b, {1e-3, Perturbation::TiltedGravity}, eff);
    DiophantineParams p = read_dio_block(b, eff);
    KamConfig cfg = read_kam_block(b, eff);
    int n = b.integer("n", 10), m = b.integer("m", 10);
    Block vb = b.child("validate");
    double vt = vb.number("t_end", 100.0);
    int vs = vb.integer("samples", 2);
    double vh = vb.number("h", 0.01);
    vb.finish();
    eff["validate"] = vb.effective();
    Block gb = b.child("calibrate_guard");
    bool calibrate = gb.boolean("enabled", false);
    double gI = gb.number("I", 0.25), gE = gb.number("E", 0.5);
    double g_lo = gb.number("eps_lo", 1e-4), g_hi = gb.number("eps_hi", 1.0);
    int g_bis = gb.integer("bisections", 12);
    gb.finish();
    eff["calibrate_guard"] = gb.effective();
    std::uint64_t seed = resolve_seed(ctx, b);
    b.finish();
    positive(n, "n");
    positive(m, "m");
    if (vt < 0.0 || vs < 0 || !(vh > 0.0)) throw ConfigError("invalid validate block");

    std::string csv = row({"chart", "I", "E", "omega1", "omega2", "epsilon", "residual", "iterations",
                           "min_weighted_divisor", "validation", "residual_history"});
    std::vector<SolvedTorus> all;
    Json chart_summ = Json::array();
    for (const auto& chart : charts) {
        LocalConjugacy lc = build_local_conjugacy(chart, spec, p, n, m, cfg, ctx.jobs);
        std::vector<const SolvedTorus*> solved;
        for (const auto& t : lc.tori())
            if (t) solved.push_back(&*t);
        std::vector<double> val(solved.size(), 0.0);
        if (vt > 0.0 && vs > 0)
            parallel_for(solved.size(), ctx.jobs, [&](std::size_t k) {
                val[k] = validate_torus(*solved[k], spec, vt, vs, seed, vh);
            });
        double max_res = 0.0, max_val = 0.0;
        for (std::size_t k = 0; k < solved.size(); ++k) {
            const SolvedTorus& st = *solved[k];
            std::string hist;
            for (double r : st.residual_history) hist += (hist.empty() ? "" : ";") + d(r);
            csv += row({std::to_string(chart.id), d(st.value.I), d(st.value.E), d(st.omega.omega1),
                        d(st.omega.omega2), d(st.epsilon), d(st.residual), std::to_string(st.iterations),
                        d(st.min_weighted_divisor), d(val[k]), hist});
            max_res = std::max(max_res, st.residual);
            max_val = std::max(max_val, val[k]);
            all.push_back(st);
        }
        chart_summ.push_back({{"chart", chart_json(chart)},
                              {"diophantine_nodes", lc.grid().in_fraction() * double(n) * double(m)},
                              {"solved", solved.size()},
                              {"max_residual", max_res},
                              {"max_validation", max_val}});
        ctx.note(fmt::format("solve-tori: chart {} solved {} tori, max residual {:.3g}", chart.id, solved.size(),
                             max_res));
    }
    write_text(ctx, "tori.csv", csv);
    write_tori((ctx.out_dir / "tori.bin").string(), all);

    Json summary = {{"charts", chart_summ}, {"epsilon", spec.epsilon},
                    {"perturbation", perturbation_name(spec.perturbation)}};
    if (calibrate) {
        GuardCalibration gc = calibrate_guard({gI, gE}, spec.perturbation, cfg, g_lo, g_hi, g_bis);
        summary["guard"] = {{"guard", gc.guard}, {"failing", gc.failing}, {"solves", gc.solves}};
    }
    write_json(ctx, "solve_tori.json", summary);
    write_manifest(ctx, eff, {"tori.csv", "tori.bin", "solve_tori.json"});
    return 0;
}

int cmd_glue(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    Json& eff = b.effective();
    std::vector<ChartSpec> charts = read_charts(b, eff, 2);
    ValueWindow region = read_window(b, "region", {0.2, 0.4, 0.35, 0.65}, eff);
    HamiltonianSpec spec = read_ham_block(b, {1e-3, Perturbation::TiltedGravity}, eff);
    DiophantineParams p = read_dio_block(b, eff);
    KamConfig cfg = read_kam_block(b, eff);
    int n = b.integer("n", 6), m = b.integer("m", 6);
    double inset = b.number("inset", 0.1);
    double lemma_tol = b.number("lemma_tol", 1e-6);
    int pn = b.integer("partition_samples", 41);
    Block vb = b.child("verify");
    int fibers = vb.integer("fibers", 5);
    int points = vb.integer("points", 4);
    double vt = vb.number("t_end", 50.0);
    double vh = vb.number("h", 0.01);
    vb.finish();
    eff["verify"] = vb.effective();
    std::uint64_t seed = resolve_seed(ctx, b);
    b.finish();
    positive(n, "n");
    positive(m, "m");
    positive(pn, "partition_samples");
    positive(fibers, "verify.fibers");

    PartitionOfUnity pu = build_partition(charts, region, inset);
    std::string pc = "I,E";
    for (const auto& c : charts) pc += fmt::format(",xi_{}", c.id);
    pc += ",sum\n";
    for (int i = 0; i < pn; ++i)
        for (int j = 0; j < pn; ++j) {
            EMValue v = region.at(pn > 1 ? double(i) / (pn - 1) : 0.5, pn > 1 ? double(j) / (pn - 1) : 0.5);
            std::vector<double> w = pu.weights(v);
            double s = 0.0;
            pc += d(v.I) + "," + d(v.E);
            for (double x : w) {
                pc += "," + d(x);
                s += x;
            }
            pc += "," + d(s) + "\n";
        }
    write_text(ctx, "partition.csv", pc);

    std::vector<std::shared_ptr<const LocalConjugacy>> locals;
    for (const auto& c : charts) {
        locals.push_back(std::make_shared<const LocalConjugacy>(build_local_conjugacy(c, spec, p, n, m, cfg, ctx.jobs)));
        ctx.note(fmt::format("glue: chart {} solved {} tori", c.id, locals.back()->solved_count()));
    }
    GlobalConjugacy g = glue(locals, pu, lemma_tol);
    std::vector<EMValue> values = sample_glued_values(g, fibers, seed);
    if (values.empty()) throw DomainError("no admitted Diophantine value found in the region");
    ConjugacyReport rep = verify_global_conjugacy(g, values, points, vt, seed, vh, ctx.jobs);

    std::string fc = row({"I", "E", "reference", "theta1_translation", "theta2_translation", "max_deviation",
                          "identity_distance", "defect"});
    Json fj = Json::array();
    for (const auto& f : rep.fibers) {
        fc += row({d(f.value.I), d(f.value.E), std::to_string(f.reference), d(f.mean_translation.theta1),
                   d(f.mean_translation.theta2), d(f.max_deviation), d(f.identity_distance), d(f.defect)});
        GluedFiber gf = g.fiber(f.value);
        Json tr = Json::array();
        for (const auto& t : gf.transitions)
            tr.push_back({{"from", t.i}, {"to", t.j}, {"c", {t.c.theta1, t.c.theta2}}, {"deviation", t.deviation},
                          {"image_distance", t.image_distance}});
        fj.push_back({{"value", value_json(f.value)}, {"charts", gf.charts}, {"weights", gf.weights},
                      {"transitions", tr}, {"defect", f.defect}, {"identity_distance", f.identity_distance}});
    }
    write_text(ctx, "glue_fibers.csv", fc);
    Json out = {{"region", {{"I", {region.I0, region.I1}}, {"E", {region.E0, region.E1}}}},
                {"epsilon", spec.epsilon},
                {"max_defect", rep.max_defect},
                {"max_identity_distance", rep.max_identity_distance},
                {"defect_over_epsilon", spec.epsilon != 0.0 ? Json(rep.max_defect / std::abs(spec.epsilon)) : Json()},
                {"fibers", fj}};
    write_json(ctx, "glue.json", out);
    ctx.note(fmt::format("glue: {} fibers, max defect {:.3g}", rep.fibers.size(), rep.max_defect));
    write_manifest(ctx, eff, {"partition.csv", "glue_fibers.csv", "glue.json"});
    return 0;
}

int cmd_verify_freq(const Context& ctx0) {
    Context ctx = ctx0;
    Block b = command_block(ctx);
    Json& eff = b.effective();
    HamiltonianSpec spec = read_ham_block(b, {0.0, Perturbation::TiltedGravity}, eff);
    ValueWindow win = read_window(b, "window", {0.05, 0.6, -0.5, 0.8}, eff);
    int count = b.integer("count", 20);
    double t_end = b.number("t_end", 500.0);
    double h = b.number("h", 0.01);
    int stride = b.integer("stride", 5);
    std::vector<EMValue> values;
    if (b.has("points")) {
        const Json& pts = b.raw("points");
        if (!pts.is_array()) throw ConfigError("verify-freq.points must be an array of [I, E] pairs");
        for (const auto& q : pts) {
            if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number())
                throw ConfigError("verify-freq.points must be an array of [I, E] pairs");
            values.push_back({q[0].get<double>(), q[1].get<double>()});
        }
        eff["points"] = pts;
    }
    std::uint64_t seed = resolve_seed(ctx, b);
    b.finish();
    if (!(t_end > 0.0) || !(h > 0.0) || stride < 1) throw ConfigError("t_end, h and stride must be positive");
    if (values.empty()) {
        positive(count, "count");
        for (std::uint64_t k = 0; int(values.size()) < count && k < std::uint64_t(count) * 1000; ++k) {
            EMValue v = win.at(counter_uniform(seed, 8, k), counter_uniform(seed, 9, k));
            if (classify(v) == ValueClass::Regular && v.I > 1e-3) values.push_back(v);
        }
    }
    for (const auto& v : values)
        if (classify(v) != ValueClass::Regular)
            throw InvalidPointError(fmt::format("value ({}, {}) is not regular", v.I, v.E));

    struct Out {
        FrequencyVector quad;
        TrajectoryFrequencies tf;
    };
    std::vector<Out> res(values.size());
    parallel_for(values.size(), ctx.jobs, [&](std::size_t k) {
        res[k].quad = frequency_map(values[k]);
        res[k].tf = trajectory_frequencies(chart_point(values[k], {0.0, 0.0}), spec, t_end, h, stride);
    });
    std::string csv = row({"I", "E", "omega1_quadrature", "omega2_quadrature", "omega1_trajectory",
                           "omega2_trajectory", "relative_error", "error_estimate"});
    double worst = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const auto& r = res[k];
        double e1 = std::abs(r.tf.omega.omega1 - r.quad.omega1) / std::abs(r.quad.omega1);
        double e2 = std::abs(r.tf.omega.omega2 - r.quad.omega2) / std::abs(r.quad.omega2);
        double rel = std::max(e1, e2);
        worst = std::max(worst, rel);
        csv += row({d(values[k].I), d(values[k].E), d(r.quad.omega1), d(r.quad.omega2), d(r.tf.omega.omega1),
                    d(r.tf.omega.omega2), d(rel),
                    d(std::max(r.tf.height.error_estimate, r.tf.azimuthal.error_estimate))});
    }
    write_text(ctx, "verify_freq.csv", csv);
    Json summary = {{"points", values.size()}, {"epsilon", spec.epsilon}, {"max_relative_error", worst}};
    write_json(ctx, "verify_freq.json", summary);
    ctx.note(fmt::format("verify-freq: {} points, max relative error {:.3g}", values.size(), worst));
    write_manifest(ctx, eff, {"verify_freq.csv", "verify_freq.json"});
    return 0;
}

}  // namespace torus_atlas::cli
