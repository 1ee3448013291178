#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rb/indices.hpp"
#include "rb/model.hpp"
#include "rb/relaxation.hpp"

namespace rb {

// Fills the budget along sigma: y_{sigma_i,1} = clamp(alpha - used, 0, m_{sigma_i}).
OccupationVector priority_rule(const std::vector<int>& sigma, double alpha, const Vector& m);

// One epoch of water-filling data. Buckets are enumerated S+ (tie-break order),
// S0 (enumeration order), S- (tie-break order), Sempty.
struct WaterFillingEpoch {
    double alpha = 0.0;
    std::vector<int> splus_order;   // descending tie-break score
    std::vector<int> szero_enum;    // forward enumeration order (pass 2 reverses it)
    std::vector<int> sminus_order;  // descending tie-break score
    std::vector<int> sempty_order;
    Vector ystar1;                  // per-state caps for the first S0 pass
};

// Three passes: (1) S+ up to m_s; (2) S0 in reversed enumeration order up to
// min(m_s, y*_{s,1}); (3) leftover budget over S0 forward, then S-, then Sempty,
// capped by m_s. Emits y*(t) exactly when m = m*(t).
OccupationVector water_filling_rule(const WaterFillingEpoch& epoch, const Vector& m);

struct RoundingOutcome {
    std::vector<long> activations;  // per state
    long budget_used = 0;
};

// Integer activations with exact marginals: floor(N y_{s,1}) per state plus a
// systematic-sampling pass over the residuals, so E[Z_s] = z_s and the total is
// floor(alpha N) + Bernoulli(frac(alpha N)) — the budget coin toss and the
// rounding share one uniform draw.
RoundingOutcome randomized_round(const Vector& y1, const ArmPopulationState& pop,
                                 std::mt19937_64& rng);

// A decision rule maps (epoch, state distribution) to an admissible occupation
// vector: y >= 0, sum_s y_{s,1} = alpha, y_{s,0} + y_{s,1} = m_s. Rules with
// internal state (LP-update) mutate only their own clone; simulators clone one
// rule per replication.
class DecisionRule {
  public:
    virtual ~DecisionRule() = default;
    virtual OccupationVector decide(int t, const Vector& m) = 0;
    virtual std::unique_ptr<DecisionRule> clone() const = 0;
    virtual std::string name() const = 0;
    virtual void reset() {}  // called at the start of every trajectory
};

// Fixed priority order applied at every epoch.
std::unique_ptr<DecisionRule> priority_policy(const std::vector<int>& sigma, double alpha);

// Water-filling with explicit per-state tie-break scores for S+/S-/Sempty
// (higher first). The S0 enumeration is ascending |index| then state id when an
// index table is given, else ascending state id.
std::unique_ptr<DecisionRule> water_filling_policy(const FiniteLPSolution& solution, double alpha,
                                                   const Vector& tie_scores,
                                                   const IndexTable* indices = nullptr);

// Water-filling with LP indices as tie-break scores per epoch.
std::unique_ptr<DecisionRule> lp_index_policy(const RBModel& model,
                                              const FiniteLPSolution& solution,
                                              const IndexTable& indices);

// Re-solves the remaining-horizon LP from the observed distribution every
// update_period epochs and plays that LP's first decision; between updates,
// water-fills from the most recent solution.
std::unique_ptr<DecisionRule> lp_update_policy(const RBModel& model, int update_period = 1);

// Stationary priority S+ (descending index), then S0, then S- (descending index).
std::unique_ptr<DecisionRule> lp_priority_policy_infinite(const RBModel& model,
                                                          const InfiniteLPSolution& solution,
                                                          const IndexTable& indices);

// The stationary priority order used by lp_priority_policy_infinite.
std::vector<int> lp_priority_order(const InfiniteLPSolution& solution, const IndexTable& indices);

}  // namespace rb
