#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rb/model.hpp"
#include "rb/policies.hpp"
#include "rb/simulate.hpp"

namespace rb {

// Affine normalization of a policy value between the minimizing and maximizing
// relaxations. Throws std::domain_error when v_rel == v_rel_min.
double score(double v, double v_rel, double v_rel_min);

struct ScoreRecord {
    int model_id = 0;
    std::string policy_id;
    long n = 0;
    double score = 0.0;
    double ci = 0.0;  // score-scale 95% half-width
};

struct TieSolvingConfig {
    int models = 100;
    int d = 10;
    int horizon = 20;
    std::vector<long> n_grid = {10, 20, 30, 40, 50};
    int random_orders = 5;
    int replications = 1000;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct TieSolvingResult {
    std::vector<ScoreRecord> records;
    // Per n: mean LP-index score, mean random-order score, and the paired
    // difference with its CI half-width across models.
    struct Summary {
        long n = 0;
        double lp_index_mean = 0.0;
        double random_mean = 0.0;
        double diff_mean = 0.0;
        double diff_ci = 0.0;
        int models_lp_wins = 0;  // models where LP-index >= mean random score
    };
    std::vector<Summary> summaries;
};

// Water-filling with LP-index tie-break vs random fixed priority orders on
// random instances; scores per (model, policy, n).
TieSolvingResult tie_solving_experiment(const TieSolvingConfig& config);

struct ScreeningConfig {
    int t = 5;
    std::vector<long> n_grid = {20, 40, 80, 160};
    bool wrong_prior = false;  // hidden qualities from Beta(3,1) instead of uniform
    int replications = 1000;
    int update_period = 1;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct ScreeningRecord {
    std::string policy_id;
    long n = 0;
    double mean = 0.0;
    double ci = 0.0;
};

struct ScreeningResult {
    double v_rel = 0.0;  // relaxation bound of the uniform-prior model
    std::vector<ScreeningRecord> records;
};

// Applicant screening with hidden per-arm quality. Policies are always built
// from the uniform-prior model; wrong_prior changes only the simulator's
// hidden quality distribution.
ScreeningResult screening_experiment(const ScreeningConfig& config);

// Per-arm screening simulation (hidden quality p_n, Bernoulli interview
// signals, Bayes state updates; admitted applicant n pays its true p_n).
ValueEstimate simulate_screening(const RBModel& model, const DecisionRule& rule, long n,
                                 int replications, std::uint64_t seed, bool wrong_prior);

struct DegenerateRateConfig {
    double p1 = 0.1, p2 = 0.8, q1 = 0.9, q2 = 0.1;
    std::vector<long> n_grid = {100, 400, 1600, 6400};
    int replications = 10000;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct GapRecord {
    long n = 0;
    double gap = 0.0;  // v_rel - simulated value
    double ci = 0.0;
    double sqrt_n_gap = 0.0;
};

struct DegenerateRateResult {
    double v_rel = 0.0;
    std::vector<GapRecord> records;
    bool stabilizes = false;  // consecutive sqrt(n)*gap ratios within a factor 2
};

// LP-compatible policy on the degenerate two-state instance; the optimality
// gap decays like 1/sqrt(n), so sqrt(n)*gap settles at a positive constant.
DegenerateRateResult degenerate_rate_experiment(const DegenerateRateConfig& config);

// CSV/JSON/SVG emission (formats documented in docs/formats.md). Each writer
// embeds the config and a content fingerprint in the output header.
void write_tie_solving_outputs(const TieSolvingResult& result, const TieSolvingConfig& config,
                               const std::string& out_dir, bool svg);
void write_screening_outputs(const ScreeningResult& result, const ScreeningConfig& config,
                             const std::string& out_dir, bool svg);
void write_degenerate_rate_outputs(const DegenerateRateResult& result,
                                   const DegenerateRateConfig& config, const std::string& out_dir,
                                   bool svg);

}  // namespace rb
