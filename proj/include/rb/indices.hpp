#pragma once

#include "rb/model.hpp"
#include "rb/relaxation.hpp"

namespace rb {

// LP indices I_s(t) = Q_{s,1}(t) - Q_{s,0}(t) of the budget-dual-adjusted
// single-arm problem; optionally Whittle indices with an indexability verdict.
struct IndexTable {
    bool finite = true;
    int d = 0;
    int T = 1;           // 1 for infinite horizon
    Vector lp_index;     // finite: [t*d + s]; infinite: [s]

    bool has_whittle = false;
    Vector whittle;            // per state
    bool indexable = false;
    bool whittle_reliable = false;  // false when the indexability scan failed

    double index(int s, int t = 0) const { return lp_index[static_cast<std::size_t>(t) * d + s]; }
};

// Backward-induction tables kept around so tests can re-evaluate the recursion.
struct FiniteDpTable {
    int d = 0, T = 0;
    Vector q0, q1, v;  // [t*d + s]; v has an extra terminal row of zeros
};

IndexTable finite_lp_indices(const RBModel& model, const FiniteLPSolution& solution);
FiniteDpTable finite_lp_q_values(const RBModel& model, const FiniteLPSolution& solution);

IndexTable infinite_lp_indices(const RBModel& model, const InfiniteLPSolution& solution);

// Average-reward relative value iteration on the two-action chain with rewards
// r^a_s - a*gamma. Runs the damped operator (1-tau) v + tau Bv with tau = 1/2,
// which keeps relative values unchanged and guarantees span convergence on
// unichain inputs; gain is rescaled back.
struct RviResult {
    Vector v;           // relative values, v[0] = 0
    double gain = 0.0;
    long iterations = 0;
    bool converged = false;
};
RviResult relative_value_iteration(const Matrix& p0, const Matrix& p1, const Vector& r0,
                                   const Vector& r1, double gamma,
                                   const Vector* warm_start = nullptr, double span_tol = 1e-10,
                                   long max_iterations = 1'000'000);

// Whittle index per state by bisection on the activation penalty; membership
// ties resolved toward active. Indexability is checked numerically on a
// 200-point grid plus all bisection endpoints (a test, not a proof).
IndexTable whittle_indices(const RBModel& model);

}  // namespace rb
