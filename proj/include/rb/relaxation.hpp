#pragma once

#include <vector>

#include "rb/lp.hpp"
#include "rb/model.hpp"

namespace rb {

// Occupation mass below this threshold counts as zero for partition membership.
inline constexpr double kPartitionEps = 1e-9;

// States split by positivity of active/passive optimal mass:
//   s_plus: fully activated, s_zero: randomized, s_minus: fully passive,
//   s_empty: unvisited. The four sets partition {0..d-1}; each is ascending.
struct Partition {
    std::vector<int> s_plus, s_zero, s_minus, s_empty;

    static Partition from_occupation(const OccupationVector& y, double eps = kPartitionEps);
    int set_of(int s) const;  // 0:+ 1:0 2:- 3:empty
    const char* set_name(int s) const;
};

struct FiniteLPSolution {
    int d = 0;
    int T = 0;
    std::vector<OccupationVector> y_star;  // per epoch
    std::vector<Vector> m_star;            // per epoch, m*_s(t) = y*_{s,0}(t) + y*_{s,1}(t)
    double value = 0.0;
    Vector gamma;                          // budget-constraint duals, one per epoch
    std::vector<Partition> partition;      // per epoch
};

struct InfiniteLPSolution {
    int d = 0;
    OccupationVector y_star;  // stationary occupation measure
    Vector m_star;
    double value = 0.0;
    double gamma_star = 0.0;  // budget-constraint dual
    Partition partition;
};

// LP over variables y_{s,a}(t), grouped by epoch then state then action
// (index 2*(t*d + s) + a). Constraint rows: budget per epoch (0..T-1), then
// initial condition (d rows), then flow conservation for t = 1..T-1 (d rows
// each). The ordering is fixed so dual indices are stable.
LinearProgram build_finite_lp(const RBModel& model, LinearProgram::Sense sense);

// Stationary LP over y_{s,a} (index 2s + a). Rows: budget, then d stationarity
// rows, then total-mass normalization.
LinearProgram build_infinite_lp(const RBModel& model);

FiniteLPSolution solve_finite(const RBModel& model);
FiniteLPSolution solve_finite_min(const RBModel& model);

// Remaining-horizon solve used by the LP-update policy: initial condition
// m_init at epoch start_epoch, horizon T - start_epoch, per-epoch parameters
// shifted accordingly. Epoch tau of the result corresponds to model epoch
// start_epoch + tau.
FiniteLPSolution solve_finite_from(const RBModel& model, const Vector& m_init, int start_epoch);

InfiniteLPSolution solve_infinite(const RBModel& model);

// Witness-based verdicts relative to the solution at hand (not claims about
// all optimal solutions): rankable if every |S0(t)| <= 1, non-degenerate if
// every |S0(t)| >= 1, degenerate if some |S0(t)| = 0.
struct Classification {
    std::vector<int> szero_sizes;  // per epoch (single entry for infinite horizon)
    bool rankable_witness = false;
    bool non_degenerate_witness = false;
    bool degenerate_witness = false;
};

Classification classify(const FiniteLPSolution& solution);
Classification classify(const InfiniteLPSolution& solution);

}  // namespace rb
