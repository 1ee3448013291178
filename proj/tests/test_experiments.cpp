#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rb/experiments.hpp"
#include "rb/relaxation.hpp"

using namespace rb;

TEST_CASE("score endpoints and midpoint") {
    CHECK(score(2.0, 2.0, 1.0) == doctest::Approx(1.0));
    CHECK(score(1.0, 2.0, 1.0) == doctest::Approx(0.0));
    CHECK(score(1.5, 2.0, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(score(1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("tie-solving micro run: well-formed, bounded, deterministic") {
    TieSolvingConfig config;
    config.models = 3;
    config.d = 4;
    config.horizon = 6;
    config.n_grid = {10, 20};
    config.random_orders = 2;
    config.replications = 200;
    config.seed = 5;
    TieSolvingResult a = tie_solving_experiment(config);
    CHECK(a.records.size() == 3 * 3 * 2);
    for (const auto& rec : a.records) {
        CHECK(rec.score >= -3.0 * rec.ci - 1e-9);
        CHECK(rec.score <= 1.0 + 3.0 * rec.ci + 1e-9);
    }
    REQUIRE(a.summaries.size() == 2);
    for (const auto& s : a.summaries) CHECK(s.models_lp_wins <= 3);

    TieSolvingResult b = tie_solving_experiment(config);
    REQUIRE(b.records.size() == a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].score == b.records[i].score);
        CHECK(a.records[i].policy_id == b.records[i].policy_id);
    }
}

TEST_CASE("lp-index scores climb toward 1 as the population grows") {
    TieSolvingConfig config;
    config.models = 10;
    config.d = 10;
    config.horizon = 20;
    config.n_grid = {10, 40};
    config.random_orders = 1;
    config.replications = 300;
    config.seed = 21;
    TieSolvingResult result = tie_solving_experiment(config);
    REQUIRE(result.summaries.size() == 2);
    CHECK(result.summaries[1].lp_index_mean > result.summaries[0].lp_index_mean);
    CHECK(result.summaries[1].lp_index_mean > 0.9);
}

TEST_CASE("screening micro run: bounded by the relaxation, deterministic") {
    ScreeningConfig config;
    config.t = 4;
    config.n_grid = {12, 24};
    config.replications = 150;
    config.seed = 9;
    ScreeningResult a = screening_experiment(config);
    CHECK(a.records.size() == 4);
    CHECK(a.v_rel > 0.0);
    for (const auto& rec : a.records) {
        CHECK(rec.mean <= a.v_rel + 3.0 * rec.ci + 1e-9);
        CHECK(rec.mean > 0.0);
    }
    ScreeningResult b = screening_experiment(config);
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].mean == b.records[i].mean);
}

TEST_CASE("screening simulation distinguishes the hidden prior") {
    RBModel model = screening_model(4);
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);
    auto rule = lp_index_policy(model, sol, idx);
    ValueEstimate correct = simulate_screening(model, *rule, 40, 400, 3, false);
    ValueEstimate wrong = simulate_screening(model, *rule, 40, 400, 3, true);
    // beta(3,1) qualities are stochastically larger, admitted values rise
    CHECK(wrong.mean > correct.mean);
}

TEST_CASE("degenerate-rate micro run: positive gaps, determinism") {
    DegenerateRateConfig config;
    config.n_grid = {50, 200};
    config.replications = 2000;
    config.seed = 11;
    DegenerateRateResult a = degenerate_rate_experiment(config);
    REQUIRE(a.records.size() == 2);
    CHECK(a.v_rel == doctest::Approx(11.0 / 15.0).epsilon(1e-9));
    for (const auto& rec : a.records) CHECK(rec.gap > 0.0);
    DegenerateRateResult b = degenerate_rate_experiment(config);
    CHECK(a.records[0].gap == b.records[0].gap);

    DegenerateRateConfig bad;
    bad.q1 = 0.0;
    bad.p2 = 0.0;
    CHECK_THROWS_AS(degenerate_rate_experiment(bad), std::invalid_argument);
}

TEST_CASE("non-degenerate instances beat the square-root decay rate") {
    // find a non-degenerate witness, then compare sqrt(n)-scaled gaps: they
    // must shrink, unlike the degenerate instance where they stabilize
    RBModel model;
    bool found = false;
    for (std::uint64_t seed = 0; seed < 100 && !found; ++seed) {
        RBModel candidate = random_model(5, 10, 8800 + seed);
        if (classify(solve_finite(candidate)).non_degenerate_witness) {
            model = candidate;
            found = true;
        }
    }
    REQUIRE(found);
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);
    auto rule = lp_index_policy(model, sol, idx);
    auto gap_at = [&](long n) {
        SimulationResult sim = simulate_policy(model, *rule, n, 4000, 1234 + n);
        return std::pair<double, double>{sol.value - sim.value.mean, sim.value.half_width};
    };
    auto [gap_small, ci_small] = gap_at(10);
    auto [gap_big, ci_big] = gap_at(200);
    REQUIRE(gap_small > 3.0 * ci_small);  // the small-population gap is real
    double scaled_small = std::sqrt(10.0) * gap_small;
    double scaled_big = std::sqrt(200.0) * (gap_big + ci_big);
    CHECK(scaled_big < 0.5 * scaled_small);
}

TEST_CASE("experiment writers emit provenance-stamped outputs") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "rb_experiment_outputs";
    fs::remove_all(dir);

    DegenerateRateConfig config;
    config.n_grid = {50};
    config.replications = 500;
    DegenerateRateResult result = degenerate_rate_experiment(config);
    write_degenerate_rate_outputs(result, config, dir.string(), true);

    REQUIRE(fs::exists(dir / "results.csv"));
    REQUIRE(fs::exists(dir / "config.json"));
    REQUIRE(fs::exists(dir / "plot.svg"));
    std::ifstream in(dir / "results.csv");
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line.rfind("# config_hash=", 0) == 0);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,gap,ci_half_width,sqrt_n_gap,v_rel,stabilizes");
    fs::remove_all(dir);
}
