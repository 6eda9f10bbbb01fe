#include "catch_amalgamated.hpp"

#include "torus_atlas/errors.hpp"
#include "torus_atlas/monodromy.hpp"

#include <cmath>

using namespace torus_atlas;
using Catch::Approx;

namespace {

constexpr double kTwoPi = 6.283185307179586;

MonodromyMatrix M(long long k) {
    MonodromyMatrix m;
    m << 1, k, 0, 1;
    return m;
}

}  // namespace

TEST_CASE("loop around the focus-focus value", "[monodromy]") {
    LoopPath loop = LoopPath::circle({0.0, 1.0}, 0.3, 16);
    RotationReport rep;
    MonodromyMatrix m = monodromy_matrix(loop, {}, 1, &rep);
    CHECK(m == M(1));
    CHECK(rep.delta_theta == Approx(kTwoPi).margin(1e-6));
    CHECK(rep.largest_jump < RefinementParams{}.max_jump);
    CHECK(winding_number(loop) == 1);
}

TEST_CASE("orientation and base point", "[monodromy]") {
    LoopPath cw = LoopPath::circle({0.0, 1.0}, 0.2, 12, false, 0.7);
    CHECK(monodromy_matrix(cw) == M(-1));
    CHECK(monodromy_matrix(LoopPath::circle({0.0, 1.0}, 0.3, 16).reversed()) == M(-1));
    CHECK(winding_number(cw) == -1);
}

TEST_CASE("contractible loops give the identity", "[monodromy]") {
    LoopPath a = LoopPath::circle({0.3, 0.5}, 0.1, 10);
    CHECK(monodromy_matrix(a) == M(0));
    // crosses the axis I = 0 away from the singular value
    LoopPath b = LoopPath::circle({0.0, 1.6}, 0.3, 16);
    RotationReport rep;
    CHECK(monodromy_matrix(b, {}, 0, &rep) == M(0));
    CHECK(std::abs(rep.delta_theta) < 1e-8);
    CHECK(winding_number(b) == 0);
}

TEST_CASE("concatenation multiplies", "[monodromy]") {
    LoopPath a = LoopPath::circle({0.0, 1.0}, 0.3, 16);
    LoopPath b = LoopPath::circle({0.0, 1.0}, 0.15, 9);  // other base point
    LoopPath twice = a.then(a);
    CHECK(monodromy_matrix(twice) == M(2));
    CHECK(monodromy_matrix(a.then(a.reversed())) == M(0));
    CHECK(monodromy_matrix(twice) == monodromy_matrix(a) * monodromy_matrix(a));
    CHECK_THROWS_AS(a.then(b), ValidationError);
}

TEST_CASE("loops through singular values are refused", "[monodromy]") {
    LoopPath bad = LoopPath::circle({0.0, 1.0}, 0.3, 16);
    bad.vertices[3] = {0.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    LoopPath open = LoopPath::circle({0.3, 0.5}, 0.1, 10);
    open.vertices.pop_back();
    CHECK_THROWS_AS(open.validate(), ValidationError);
    CHECK_THROWS_AS(LoopPath::circle({0.0, 1.0}, 0.3, 2), ValidationError);
}

TEST_CASE("refinement budget is enforced", "[monodromy]") {
    RefinementParams rp;
    rp.max_samples = 10;
    CHECK_THROWS_AS(continue_rotation(LoopPath::circle({0.0, 1.0}, 0.3, 16), rp), RefinementBudgetError);
    rp.max_samples = 1000;
    rp.max_jump = 1e-3;  // a full turn needs more than 6000 samples
    CHECK_THROWS_AS(continue_rotation(LoopPath::circle({0.0, 1.0}, 0.3, 16), rp), RefinementBudgetError);
}
