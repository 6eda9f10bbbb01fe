#include "catch_amalgamated.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/kam.hpp"
#include "torus_atlas/spline.hpp"
#include "torus_atlas/torus_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace torus_atlas;
using Catch::Approx;

namespace {

const EMValue kV{0.25, 0.5};

KamConfig config64() {
    KamConfig c;
    c.N = 64;
    return c;
}

// K(theta) on the grid against the interpolant, sup over components.
double grid_distance(const TorusEmbedding& A, const TorusEmbedding& B) {
    return (A.values() - B.values()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("integrable torus solves the unperturbed equation", "[kam]") {
    TorusEmbedding K0 = integrable_embedding(kV, 64);
    FrequencyVector w = frequency_map(kV);
    CHECK(invariance_residual(K0, w, {}) < 1e-10);
    CHECK(K0.max_constraint_defect() < 1e-12);
    SolvedTorus st = solve_invariance(K0, w, {}, config64());
    CHECK(st.iterations == 0);
    CHECK(st.residual < 1e-10);
}

TEST_CASE("Newton converges quadratically", "[kam]") {
    for (auto f : {Perturbation::TiltedGravity, Perturbation::Quadrupole}) {
        SolvedTorus st = solve_torus(kV, {1e-3, f}, config64());
        CAPTURE(perturbation_name(f));
        CHECK(st.residual <= 1e-10);
        const auto& h = st.residual_history;
        REQUIRE(h.size() >= 3);
        CHECK(h[0] == Approx(1e-3).epsilon(0.5));
        // r_{k+1} <= C r_k^2 with a moderate constant
        for (std::size_t k = 0; k + 1 < h.size(); ++k) CHECK(h[k + 1] < 10.0 * h[k] * h[k] + 1e-11);
        CHECK(st.min_weighted_divisor > 0.0);
    }
}

TEST_CASE("solved torus is invariant under the perturbed flow", "[kam]") {
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    SolvedTorus st = solve_torus(kV, spec, config64());
    CHECK(validate_torus(st, spec, 20.0, 2, 5) < 1e-8);
}

TEST_CASE("gauge is fixed regardless of the seed phase", "[kam]") {
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    FrequencyVector w = frequency_map(kV);
    TorusEmbedding K0 = integrable_embedding(kV, 64);
    SolvedTorus a = solve_invariance(K0, w, spec, config64());
    SolvedTorus b = solve_invariance(translate_on_torus(K0, {0.4, -1.1}), w, spec, config64());
    CHECK(grid_distance(a.K, b.K) < 1e-9);

    Eigen::Matrix2d G;
    G << 0.05, 0.02, 0.02, -0.03;
    SolvedTorus c = solve_invariance(K0, w, spec, config64(), G);
    SolvedTorus d = solve_invariance(translate_on_torus(K0, {2.0, 0.3}), w, spec, config64(), G);
    CHECK(grid_distance(c.K, d.K) < 1e-9);
}

TEST_CASE("guard and failure classification", "[kam]") {
    KamConfig cfg = config64();
    cfg.smallness_guard = 0.01;
    CHECK_THROWS_AS(solve_torus(kV, {0.02, Perturbation::TiltedGravity}, cfg), SmallnessViolated);

    KamConfig coarse = config64();
    CHECK_THROWS_AS(solve_torus(kV, {0.05, Perturbation::TiltedGravity}, coarse), GridTooCoarse);

    KamConfig fine;
    fine.N = 128;
    CHECK_NOTHROW(solve_torus(kV, {0.05, Perturbation::TiltedGravity}, fine));
    CHECK_THROWS_AS(solve_torus(kV, {0.5, Perturbation::TiltedGravity}, fine), SmallnessViolated);
}

TEST_CASE("guard calibration brackets the breakdown", "[kam]") {
    GuardCalibration g = calibrate_guard(kV, Perturbation::TiltedGravity, config64(), 1e-4, 1.0, 8);
    CHECK(g.guard > 1e-3);
    CHECK(g.failing > g.guard);
    CHECK(g.failing < 1.0);
    KamConfig cfg = config64();
    cfg.smallness_guard = g.guard;
    CHECK_NOTHROW(solve_torus(kV, {g.guard, Perturbation::TiltedGravity}, cfg));
    CHECK_THROWS_AS(solve_torus(kV, {g.failing, Perturbation::TiltedGravity}, cfg), SmallnessViolated);
}

TEST_CASE("config validation", "[kam]") {
    KamConfig c;
    c.N = 48;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = KamConfig{};
    c.filter_fraction = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("not-a-knot spline reproduces cubics", "[kam][spline]") {
    SplineWeights sw({0.0, 0.3, 0.5, 1.1, 1.4});
    auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 0.7 * x * x * x; };
    std::vector<double> y;
    for (double x : sw.nodes()) y.push_back(p(x));
    for (double t : {0.1, 0.45, 0.8, 1.3, 1.5}) CHECK(sw.interpolate(y, t) == Approx(p(t)).margin(1e-12));
    SplineWeights two({0.0, 1.0});
    CHECK(two.interpolate({1.0, 3.0}, 0.25) == Approx(1.5));
    SplineWeights three({0.0, 1.0, 2.0});
    CHECK(three.interpolate({0.0, 1.0, 4.0}, 1.5) == Approx(2.25));
}

TEST_CASE("local conjugacy interpolates between grid tori", "[kam]") {
    ChartSpec c;
    c.window = {0.2, 0.3, 0.4, 0.6};
    HamiltonianSpec spec{1e-3, Perturbation::TiltedGravity};
    LocalConjugacy lc = build_local_conjugacy(c, spec, {1e-3, 1.5, 100}, 5, 5, config64(), 1);
    REQUIRE(lc.solved_count() > 0);
    EMValue v{0.2431, 0.4877};
    REQUIRE(lc.admits(v));
    SolvedTorus rough = lc.torus_at(v, false);
    SolvedTorus sharp = lc.torus_at(v, true);
    CHECK(sharp.residual < 1e-10);
    CHECK(rough.residual < 1e-4);
    CHECK(grid_distance(rough.K, sharp.K) < 1e-4);
    CHECK_THROWS_AS(lc.torus_at({0.5, 0.5}), DomainError);
}

TEST_CASE("torus dump round-trips", "[kam][io]") {
    SolvedTorus st = solve_torus(kV, {1e-3, Perturbation::Quadrupole}, config64());
    auto path = std::filesystem::temp_directory_path() / "torus_atlas_roundtrip.bin";
    write_tori(path.string(), {st, st});
    std::vector<SolvedTorus> back = read_tori(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].K.n() == 64);
    CHECK(back[1].omega.omega1 == st.omega.omega1);
    CHECK(back[1].perturbation == Perturbation::Quadrupole);
    CHECK(grid_distance(back[1].K, st.K) < 1e-14);
}
