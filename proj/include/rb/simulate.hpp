#pragma once

#include <cstdint>
#include <vector>

#include "rb/model.hpp"
#include "rb/policies.hpp"
#include "rb/relaxation.hpp"

namespace rb {

// One-step deterministic transition: (phi(y))_s = sum_{s',a} y_{s',a} P^a_{s',s}.
// Linear in y; preserves total mass.
Vector phi(const Matrix& p0, const Matrix& p1, const OccupationVector& y);
Vector phi(const RBModel& model, int t, const OccupationVector& y);

struct Trajectory {
    std::vector<std::vector<long>> counts;       // per epoch, length d
    std::vector<std::vector<long>> activations;  // per epoch, length d
    double reward_per_arm = 0.0;
};

struct ValueEstimate {
    double mean = 0.0;
    double half_width = 0.0;  // 1.96 * sample std / sqrt(replications)
    int replications = 0;
};

struct SimulationResult {
    ValueEstimate value;
    Trajectory sample;  // first replication
};

// N-arm finite-horizon simulation. Initial counts by largest-remainder
// apportionment of n * m(0); each epoch evaluates the rule on the empirical
// measure, rounds, then evolves arms count-wise (one multinomial per
// state-action group — distribution-identical to per-arm sampling).
// Replication r uses the RNG stream (seed, r).
SimulationResult simulate_policy(const RBModel& model, const DecisionRule& rule, long n,
                                 int replications, std::uint64_t seed);

// Time-average reward over `horizon` epochs after discarding `burn_in`.
ValueEstimate simulate_policy_infinite(const RBModel& model, const DecisionRule& rule, long n,
                                       int burn_in, int horizon, int replications,
                                       std::uint64_t seed);

struct MeanFieldTrajectory {
    std::vector<Vector> m;             // m(0..T-1)
    std::vector<OccupationVector> y;   // y(0..T-1)
    double value = 0.0;                // sum_t sum_{s,a} R^a_s y_{s,a}(t)
};

// Deterministic recursion y(t) = rule(m(t)), m(t+1) = phi(y(t)).
MeanFieldTrajectory mean_field(const RBModel& model, const DecisionRule& rule);

// One-step error E = M(t+1) - phi(Y(t)) sampled from a fixed (m, y) pair.
struct ErrorStats {
    long n = 0;
    long samples = 0;
    Vector coord_mean;        // per-coordinate mean of E
    Vector coord_sigma;       // std of each coordinate mean estimate
    double mean_l1 = 0.0;     // mean of |E|_1
    double l1_bound = 0.0;    // sqrt(d)/sqrt(n)
    std::vector<double> eps;
    std::vector<double> tail_freq;   // empirical P(|E|_1 >= eps)
    std::vector<double> tail_bound;  // 2 d exp(-2 n eps^2 / d^2)
};

ErrorStats lemma1_statistics(const RBModel& model, const DecisionRule& rule, long n, long samples,
                             std::uint64_t seed, std::vector<double> eps = {0.05, 0.1});

// Iterates the closed-loop map m -> phi(rule(m)) from random and corner starts
// and reports whether every orbit enters and stays in the epsilon-ball of m*.
struct UGAPReport {
    bool consistent = false;
    double epsilon = 0.0;
    int t_max = 0;
    int empirical_t_eps = -1;    // max over starts of the entry time
    double max_final_distance = 0.0;
    bool has_witness = false;
    Vector witness_start;        // a violating start when not consistent
};

UGAPReport ugap_check(const RBModel& model, const DecisionRule& rule, int grid_size, int t_max,
                      double epsilon, std::uint64_t seed);

// Exact V^(N)_opt per arm for tiny instances: backward induction over arm-count
// vectors with all feasible activation splits and exact multinomial transition
// probabilities. Requires alpha*n and n*m0 integral; throws when the DP size
// estimate exceeds cell_cap.
double exact_oracle(const RBModel& model, long n, std::size_t cell_cap = 10'000'000);

}  // namespace rb
