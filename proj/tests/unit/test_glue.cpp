#include "catch_amalgamated.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/glue.hpp"

#include <cmath>
#include <memory>

using namespace torus_atlas;
using Catch::Approx;

namespace {

std::vector<ChartSpec> two_charts() {
    ChartSpec a, b;
    a.id = 0;
    a.window = {0.15, 0.35, 0.3, 0.7};
    b.id = 1;
    b.window = {0.25, 0.45, 0.3, 0.7};
    b.gauge << 0.05, 0.02, 0.02, -0.03;
    return {a, b};
}

const ValueWindow kRegion{0.2, 0.4, 0.35, 0.65};

}  // namespace

TEST_CASE("bump is smooth, positive inside and zero outside", "[glue]") {
    CHECK(bump(0.0) == Approx(std::exp(-1.0)));
    CHECK(bump(1.0) == 0.0);
    CHECK(bump(-1.2) == 0.0);
    CHECK(bump(0.999) > 0.0);
    CHECK(bump(0.999) < 1e-200);
    CHECK(bump(0.3) == bump(-0.3));
}

TEST_CASE("partition of unity sums to one on the region", "[glue]") {
    PartitionOfUnity pu = build_partition(two_charts(), kRegion);
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            EMValue v = kRegion.at(i / 20.0, j / 20.0);
            std::vector<double> w = pu.weights(v);
            double s = 0.0;
            for (double x : w) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
                s += x;
            }
            CHECK(s == Approx(1.0).margin(1e-12));
        }
    // only the first chart reaches the low-I edge
    std::vector<double> w = pu.weights(EMValue{0.2, 0.5});
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 0.0);
}

TEST_CASE("weights are constant on fibers", "[glue]") {
    PartitionOfUnity pu = build_partition(two_charts(), kRegion);
    EMValue v{0.3, 0.5};
    std::vector<double> a = pu.weights(chart_point(v, {0.1, 0.2}));
    std::vector<double> b = pu.weights(chart_point(v, {2.5, 4.0}));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == Approx(b[k]).margin(1e-12));
}

TEST_CASE("uncovered region is reported with a witness", "[glue]") {
    ValueWindow wide{0.1, 0.4, 0.35, 0.65};
    try {
        build_partition(two_charts(), wide);
        FAIL("expected CoverageGap");
    } catch (const CoverageGap& g) {
        CHECK(g.witness_I() < 0.2);
    }
}

TEST_CASE("overlap transitions are translations", "[glue]") {
    auto charts = two_charts();
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    KamConfig cfg;
    EMValue v{0.3, 0.5};
    SolvedTorus ti = solve_torus(v, spec, cfg, charts[0].gauge);
    SolvedTorus tj = solve_torus(v, spec, cfg, charts[1].gauge);
    TransitionMap same = overlap_translation(charts[0], ti, charts[0], ti);
    CHECK(same.c.theta1 == 0.0);
    CHECK(same.deviation == 0.0);
    TransitionMap tm = overlap_translation(charts[0], ti, charts[1], tj);
    CHECK(tm.deviation < 1e-6);
    CHECK(std::hypot(tm.c.theta1, tm.c.theta2) < 1e-3);
    // the two charts parameterize one surface
    CHECK(tm.image_distance < 1e-8);
}

TEST_CASE("unperturbed gluing is the identity", "[glue]") {
    auto charts = two_charts();
    HamiltonianSpec spec{0.0, Perturbation::TiltedGravity};
    DiophantineParams p{1e-3, 1.5, 100};
    std::vector<std::shared_ptr<const LocalConjugacy>> locals;
    for (const auto& c : charts)
        locals.push_back(std::make_shared<const LocalConjugacy>(build_local_conjugacy(c, spec, p, 4, 4, KamConfig{}, 1)));
    GlobalConjugacy g = glue(locals, build_partition(charts, kRegion));
    std::vector<EMValue> values = sample_glued_values(g, 3, 11);
    REQUIRE(values.size() == 3);
    ConjugacyReport rep = verify_global_conjugacy(g, values, 2, 10.0, 3, 0.01, 1);
    CHECK(rep.max_identity_distance < 1e-7);
    CHECK(rep.max_defect < 1e-7);
    CHECK_THROWS_AS(g.fiber({0.1, 0.5}), DomainError);
}

TEST_CASE("glued map is the same for any job count", "[glue]") {
    auto charts = two_charts();
    HamiltonianSpec spec{1e-3, Perturbation::Quadrupole};
    DiophantineParams p{1e-3, 1.5, 100};
    std::vector<std::shared_ptr<const LocalConjugacy>> locals;
    for (const auto& c : charts)
        locals.push_back(std::make_shared<const LocalConjugacy>(build_local_conjugacy(c, spec, p, 4, 4, KamConfig{}, 2)));
    GlobalConjugacy g = glue(locals, build_partition(charts, kRegion));
    std::vector<EMValue> values = sample_glued_values(g, 2, 5);
    REQUIRE_FALSE(values.empty());
    ConjugacyReport a = verify_global_conjugacy(g, values, 2, 5.0, 9, 0.01, 1);
    ConjugacyReport b = verify_global_conjugacy(g, values, 2, 5.0, 9, 0.01, 2);
    CHECK(a.max_defect == b.max_defect);
    CHECK(a.max_identity_distance == b.max_identity_distance);
    CHECK(a.max_defect < 1e-8);
}
