#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rb/model.hpp"

#include "oracles.hpp"

using namespace rb;

namespace {

RBModel identity_model(int T = 2) {
    RBModel m;
    m.d = 2;
    m.alpha = 0.5;
    m.horizon = Horizon::finite(T);
    m.p0 = {Matrix::identity(2)};
    m.p1 = {Matrix::identity(2)};
    m.r0 = {Vector{0.0, 0.0}};
    m.r1 = {Vector{1.0, 0.0}};
    m.m0 = {0.5, 0.5};
    return m;
}

}  // namespace

TEST_CASE("validate accepts a well-formed model") {
    CHECK(validate(identity_model()).ok());
}

TEST_CASE("validate names the first violated invariant") {
    RBModel bad = identity_model();
    bad.p1[0](0, 0) = 0.9;  // row sums to 0.9
    auto report = validate(bad);
    REQUIRE_FALSE(report.ok());
    CHECK(report.first()->invariant == "row-stochasticity");

    RBModel alpha_one = identity_model();
    alpha_one.alpha = 1.0;
    report = validate(alpha_one);
    REQUIRE_FALSE(report.ok());
    CHECK(report.first()->invariant == "budget fraction");
}

TEST_CASE("random_model is seed-deterministic and seed-sensitive") {
    RBModel a = random_model(10, 20, 1);
    RBModel b = random_model(10, 20, 1);
    RBModel c = random_model(10, 20, 2);
    CHECK(a == b);
    CHECK(a.p0[0].data != c.p0[0].data);
}

TEST_CASE("random_model outputs always validate") {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        RBModel m = random_model(3, 4, seed);
        if (!validate(m).ok()) {
            CAPTURE(seed);
            REQUIRE(validate(m).ok());
        }
    }
    CHECK(true);
}

TEST_CASE("degenerate_example flags the degeneracy condition") {
    auto ex = degenerate_example(0.1, 0.8, 0.9, 0.1);
    CHECK(ex.condition_holds);  // 1.7 > 1.2
    CHECK(validate(ex.model).ok());
    CHECK(ex.model.horizon.T == 2);
    CHECK(ex.model.r1[0] == Vector{1.0, 0.0});

    CHECK_FALSE(degenerate_example(0.0, 0.0, 0.0, 0.0).condition_holds);
    CHECK_THROWS_AS(degenerate_example(-0.1, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(degenerate_example(0.0, 1.2, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("beta-star oracle for the canonical parameters") {
    // frozen: beta* = 0.5 * 0.7 / 1.5 = 7/30, relaxation optimum 7/30 + 1/2 = 11/15
    CHECK(oracle::beta_star(0.1, 0.8, 0.9, 0.1) == doctest::Approx(7.0 / 30.0).epsilon(1e-12));
    CHECK(oracle::degenerate_lp_value(0.1, 0.8, 0.9, 0.1) ==
          doctest::Approx(11.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("screening_model enumerates posterior states canonically") {
    RBModel m = screening_model(5);
    CHECK(m.d == 15);  // pairs (a,b), a,b >= 1, a+b <= 6
    CHECK(validate(m).ok());
    CHECK(m.alpha == 0.25);

    auto states = screening_states(5);
    CHECK(states.front() == std::pair<int, int>{1, 1});
    CHECK(states[1] == std::pair<int, int>{1, 2});
    CHECK(states[2] == std::pair<int, int>{2, 1});

    // (1,1) interviewed: success/failure each with probability 1/2
    int root = screening_state_index(5, 1, 1);
    const Matrix& k1 = m.kernel(1, 0);
    CHECK(k1(root, screening_state_index(5, 2, 1)) == doctest::Approx(0.5));
    CHECK(k1(root, screening_state_index(5, 1, 2)) == doctest::Approx(0.5));

    // only the final epoch pays; active reward there is the posterior mean
    for (int t = 0; t + 1 < 5; ++t) CHECK(sum(m.reward(1, t)) == 0.0);
    CHECK(m.reward(1, 4)[screening_state_index(5, 3, 1)] == doctest::Approx(0.75));

    // passive kernel is the identity at every epoch
    for (int t = 0; t < 5; ++t) CHECK(m.kernel(0, t) == Matrix::identity(15));
}

TEST_CASE("screening_model needs at least one interview round") {
    CHECK_THROWS_AS(screening_model(1), std::invalid_argument);
    CHECK_NOTHROW(screening_model(2));
}

TEST_CASE("model JSON round trip is bit-exact") {
    for (RBModel m : {random_model(4, 6, 7), screening_model(4)}) {
        RBModel back = model_from_json(model_to_json(m));
        CHECK(back == m);
    }
    RBModel inf = random_model(3, 1, 9);
    inf.horizon = Horizon::forever();
    CHECK(model_from_json(model_to_json(inf)) == inf);
}

TEST_CASE("apportionment matches n*m exactly when integral") {
    auto pop = apportion({0.5, 0.25, 0.25}, 8);
    CHECK(pop.counts == std::vector<long>{4, 2, 2});
    CHECK(pop.n == 8);
}

TEST_CASE("apportionment assigns leftovers by largest remainder") {
    auto pop = apportion({0.4, 0.35, 0.25}, 2);  // exact 0.8, 0.7, 0.5
    CHECK(pop.counts == std::vector<long>{1, 1, 0});
    long total = 0;
    for (long c : pop.counts) total += c;
    CHECK(total == 2);
}

TEST_CASE("apportioned counts always sum to n") {
    auto rng = make_rng(3);
    for (int k = 0; k < 200; ++k) {
        Vector m = uniform_simplex_point(rng, 5);
        for (long n : {1L, 7L, 100L}) {
            auto pop = apportion(m, n);
            long total = 0;
            for (long c : pop.counts) total += c;
            CHECK(total == n);
        }
    }
}

TEST_CASE("occupation vector marginals and mass") {
    OccupationVector y(2);
    y.y1 = {0.3, 0.2};
    y.y0 = {0.1, 0.4};
    CHECK(y.total_mass() == doctest::Approx(1.0));
    Vector marginal = y.marginal();
    CHECK(marginal[0] == doctest::Approx(0.4));
    CHECK(marginal[1] == doctest::Approx(0.6));
}
