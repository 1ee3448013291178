#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rb/policies.hpp"
#include "rb/simulate.hpp"

#include "oracles.hpp"

using namespace rb;

namespace {

void check_admissible(const OccupationVector& y, const Vector& m, double alpha,
                      double tol = 1e-10) {
    REQUIRE(y.d() == static_cast<int>(m.size()));
    double active = 0.0;
    for (int s = 0; s < y.d(); ++s) {
        CHECK(y.y1[s] >= -tol);
        CHECK(y.y0[s] >= -tol);
        CHECK(std::abs(y.y1[s] + y.y0[s] - m[s]) <= tol);
        active += y.y1[s];
    }
    CHECK(std::abs(active - alpha) <= tol);
}

}  // namespace

TEST_CASE("priority rule pours the budget along the order") {
    OccupationVector y = priority_rule({0, 1}, 0.5, {0.3, 0.7});
    CHECK(y.y1 == Vector{0.3, 0.2});
    CHECK(y.y0[0] == doctest::Approx(0.0));
    CHECK(y.y0[1] == doctest::Approx(0.5));

    // first bucket absorbs the whole budget when large enough
    y = priority_rule({0, 1}, 0.5, {0.6, 0.4});
    CHECK(y.y1 == Vector{0.5, 0.0});
}

TEST_CASE("priority rule is admissible and monotone in the first bucket") {
    auto rng = make_rng(5);
    for (int k = 0; k < 2000; ++k) {
        Vector m = uniform_simplex_point(rng, 4);
        OccupationVector y = priority_rule({2, 0, 3, 1}, 0.35, m);
        check_admissible(y, m, 0.35);
    }
    double prev = -1.0;
    for (double m0 = 0.0; m0 <= 0.6; m0 += 0.01) {
        Vector m{m0, 0.2, 0.8 - m0};
        OccupationVector y = priority_rule({0, 1, 2}, 0.4, m);
        CHECK(y.y1[0] >= prev - 1e-12);
        prev = y.y1[0];
    }
}

TEST_CASE("priority rule is piecewise affine along segments") {
    // second differences along a segment vanish except at bucket breakpoints
    Vector a{0.7, 0.1, 0.2}, b{0.05, 0.55, 0.4};
    std::vector<int> sigma{1, 0, 2};
    const int steps = 400;
    int breaks = 0;
    std::vector<Vector> outs;
    for (int k = 0; k <= steps; ++k) {
        double w = static_cast<double>(k) / steps;
        Vector m(3);
        for (int s = 0; s < 3; ++s) m[s] = (1 - w) * a[s] + w * b[s];
        outs.push_back(priority_rule(sigma, 0.5, m).y1);
    }
    for (int k = 1; k + 1 <= steps; ++k) {
        double second = 0.0;
        for (int s = 0; s < 3; ++s)
            second += std::abs(outs[k + 1][s] - 2 * outs[k][s] + outs[k - 1][s]);
        if (second > 1e-9) ++breaks;
    }
    CHECK(breaks <= 3);  // at most one kink per bucket boundary crossed
}

TEST_CASE("water-filling reproduces the optimal occupation on the optimal trajectory") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RBModel model = random_model(5, 8, 3000 + seed);
        FiniteLPSolution sol = solve_finite(model);
        IndexTable idx = finite_lp_indices(model, sol);
        auto rule = lp_index_policy(model, sol, idx);
        for (int t = 0; t < sol.T; ++t) {
            OccupationVector y = rule->decide(t, sol.m_star[t]);
            double err = l1_distance(y.y1, sol.y_star[t].y1) + l1_distance(y.y0, sol.y_star[t].y0);
            CHECK(err <= 1e-8);
        }
    }
}

TEST_CASE("water-filling equals the priority rule when nothing randomizes") {
    RBModel model;
    model.d = 2;
    model.alpha = 0.5;
    model.horizon = Horizon::finite(3);
    model.p0 = {Matrix::identity(2)};
    model.p1 = {Matrix::identity(2)};
    model.r0 = {Vector{0.0, 0.0}};
    model.r1 = {Vector{1.0, 0.0}};
    model.m0 = {0.5, 0.5};
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);
    auto wf = lp_index_policy(model, sol, idx);
    auto rng = make_rng(8);
    for (int k = 0; k < 100; ++k) {
        Vector m = uniform_simplex_point(rng, 2);
        OccupationVector a = wf->decide(1, m);
        OccupationVector b = priority_rule({0, 1}, 0.5, m);
        CHECK(l1_distance(a.y1, b.y1) <= 1e-12);
    }
}

TEST_CASE("water-filling is Lipschitz on sampled pairs") {
    RBModel model = random_model(5, 6, 77);
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);
    auto rule = lp_index_policy(model, sol, idx);
    auto rng = make_rng(9);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        Vector m1 = uniform_simplex_point(rng, 5);
        Vector m2 = uniform_simplex_point(rng, 5);
        int t = static_cast<int>(splitmix_hash(9, k) % 6);
        OccupationVector y1 = rule->decide(t, m1);
        OccupationVector y2 = rule->decide(t, m2);
        double num = l1_distance(y1.y1, y2.y1) + l1_distance(y1.y0, y2.y0);
        double den = l1_distance(m1, m2);
        if (den > 1e-9) worst = std::max(worst, num / den);
    }
    CHECK(worst < 25.0);  // finite Lipschitz modulus at this dimension
    CHECK(worst >= 1.0);
}

TEST_CASE("water-filling output is admissible for every rule flavor") {
    RBModel model = random_model(6, 5, 123);
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);
    Vector random_scores{0.3, 0.9, 0.1, 0.5, 0.7, 0.2};
    std::vector<std::unique_ptr<DecisionRule>> rules;
    rules.push_back(lp_index_policy(model, sol, idx));
    rules.push_back(water_filling_policy(sol, model.alpha, random_scores, &idx));
    auto rng = make_rng(10);
    for (auto& rule : rules) {
        for (int k = 0; k < 5000; ++k) {
            Vector m = uniform_simplex_point(rng, 6);
            int t = static_cast<int>(splitmix_hash(11, k) % 5);
            check_admissible(rule->decide(t, m), m, model.alpha);
        }
    }
}

TEST_CASE("rounding is deterministic on integer targets") {
    auto rng = make_rng(1);
    ArmPopulationState pop{{4, 6}, 10};
    RoundingOutcome out = randomized_round({0.4, 0.1}, pop, rng);
    CHECK(out.activations == std::vector<long>{4, 1});
    CHECK(out.budget_used == 5);
}

TEST_CASE("rounding couples residuals: [2.5, 2.5] goes to [3,2] or [2,3]") {
    ArmPopulationState pop{{5, 5}, 10};
    long hits_state0 = 0;
    const int draws = 100000;
    auto rng = make_rng(2);
    for (int k = 0; k < draws; ++k) {
        RoundingOutcome out = randomized_round({0.25, 0.25}, pop, rng);
        CHECK(out.budget_used == 5);
        bool a = out.activations == std::vector<long>{3, 2};
        bool b = out.activations == std::vector<long>{2, 3};
        REQUIRE((a || b));
        if (a) ++hits_state0;
    }
    // marginal mean 2.5 per state: each pattern appears half the time, 4 sigma
    double p = static_cast<double>(hits_state0) / draws;
    CHECK(std::abs(p - 0.5) <= 4.0 * std::sqrt(0.25 / draws));
}

TEST_CASE("rounding realizes the fractional-budget coin toss") {
    // alpha*N = 2.7: total is 3 with probability 0.7, else 2
    ArmPopulationState pop{{3, 3, 3}, 9};
    Vector y1{0.3 * 0.2, 0.3 * 0.5, 0.3 * 0.3};
    long extra = 0;
    const int draws = 100000;
    auto rng = make_rng(3);
    for (int k = 0; k < draws; ++k) {
        RoundingOutcome out = randomized_round(y1, pop, rng);
        REQUIRE((out.budget_used == 2 || out.budget_used == 3));
        if (out.budget_used == 3) ++extra;
    }
    double p = static_cast<double>(extra) / draws;
    CHECK(std::abs(p - 0.7) <= 4.0 * std::sqrt(0.7 * 0.3 / draws));
}

TEST_CASE("rounding rejects targets above the arm counts") {
    auto rng = make_rng(4);
    ArmPopulationState pop{{1, 9}, 10};
    CHECK_THROWS_AS(randomized_round({0.3, 0.2}, pop, rng), std::invalid_argument);
}

TEST_CASE("lp-index policy activates the closed-form mass on the degenerate instance") {
    auto ex = degenerate_example(0.1, 0.8, 0.9, 0.1);
    FiniteLPSolution sol = solve_finite(ex.model);
    IndexTable idx = finite_lp_indices(ex.model, sol);
    auto rule = lp_index_policy(ex.model, sol, idx);
    OccupationVector y = rule->decide(0, ex.model.m0);
    CHECK(y.y1[0] == doctest::Approx(oracle::beta_star(0.1, 0.8, 0.9, 0.1)).epsilon(1e-8));
    CHECK(y.y1[1] == doctest::Approx(0.5 - oracle::beta_star(0.1, 0.8, 0.9, 0.1)).epsilon(1e-8));
}

TEST_CASE("lp-update first decision matches the one-shot relaxation") {
    RBModel model = random_model(4, 5, 31);
    FiniteLPSolution sol = solve_finite(model);
    auto rule = lp_update_policy(model);
    OccupationVector y = rule->decide(0, model.m0);
    CHECK(l1_distance(y.y1, sol.y_star[0].y1) <= 1e-9);
    CHECK(l1_distance(y.y0, sol.y_star[0].y0) <= 1e-9);
}

TEST_CASE("lp-update decisions survive count-scale rounding at large populations") {
    RBModel model = random_model(4, 4, 33);
    auto rule = lp_update_policy(model);
    // solver residuals scale with n at the rounding precondition; a million
    // arms must still round cleanly
    SimulationResult sim = simulate_policy(model, *rule, 1'000'000, 2, 77);
    CHECK(sim.value.mean > 0.0);
    long budget = static_cast<long>(std::floor(model.alpha * 1'000'000));
    for (const auto& acts : sim.sample.activations) {
        long total = 0;
        for (long a : acts) total += a;
        CHECK((total == budget || total == budget + 1));
    }
}

TEST_CASE("lp-update output stays admissible off the optimal trajectory") {
    RBModel model = random_model(4, 5, 32);
    auto rule = lp_update_policy(model, 2);
    auto rng = make_rng(12);
    for (int k = 0; k < 50; ++k) {
        auto probe = rule->clone();
        probe->reset();
        for (int t = 0; t < model.horizon.T; ++t) {
            Vector m = uniform_simplex_point(rng, 4);
            check_admissible(probe->decide(t, m), m, model.alpha, 1e-8);
        }
    }
}

TEST_CASE("infinite LP-priority policy reproduces the stationary solution") {
    RBModel model = random_model(5, 1, 91, 0.4);
    model.horizon = Horizon::forever();
    InfiniteLPSolution sol = solve_infinite(model);
    IndexTable idx = infinite_lp_indices(model, sol);
    auto rule = lp_priority_policy_infinite(model, sol, idx);
    OccupationVector y = rule->decide(0, sol.m_star);
    CHECK(l1_distance(y.y1, sol.y_star.y1) <= 1e-8);

    // the order lists S+ first, then S0, then S-
    std::vector<int> order = lp_priority_order(sol, idx);
    std::vector<int> rank(model.d);
    for (int i = 0; i < model.d; ++i) rank[order[i]] = i;
    for (int a : sol.partition.s_plus)
        for (int z : sol.partition.s_zero) CHECK(rank[a] < rank[z]);
    for (int z : sol.partition.s_zero)
        for (int b : sol.partition.s_minus) CHECK(rank[z] < rank[b]);

    // reordering within S+ keeps admissibility
    auto rng = make_rng(13);
    std::vector<int> shuffled = order;
    if (sol.partition.s_plus.size() >= 2) {
        std::swap(shuffled[0], shuffled[1]);
        auto rule2 = priority_policy(shuffled, model.alpha);
        for (int k = 0; k < 1000; ++k) {
            Vector m = uniform_simplex_point(rng, 5);
            check_admissible(rule2->decide(0, m), m, model.alpha);
        }
    }
}
