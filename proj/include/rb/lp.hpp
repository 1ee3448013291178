#pragma once

#include <string>

#include "rb/math.hpp"

namespace rb {

// Equality-form linear program: optimize objective . x subject to a x = b, x >= 0.
struct LinearProgram {
    enum class Sense { maximize, minimize };

    Sense sense = Sense::maximize;
    Vector objective;
    Matrix a;
    Vector b;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_constraints() const { return a.rows; }
};

enum class LPStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(LPStatus s);

struct LPResult {
    LPStatus status = LPStatus::numerical_failure;
    Vector primal;          // size num_vars
    Vector dual;            // one multiplier per equality constraint
    double objective = 0.0;
    bool basic = false;     // primal is a vertex of the feasible polytope
    int iterations = 0;
    double max_primal_residual = 0.0;  // max-norm of a x - b
    double duality_gap = 0.0;          // |objective - dual . b|
};

// Two-phase dense revised simplex. Returns a basic optimal solution with duals
// satisfying strong duality; Bland's rule kicks in after a degenerate stall so
// the iteration always terminates. Tolerances: pivot 1e-10, feasibility 1e-9.
LPResult solve(const LinearProgram& lp);

}  // namespace rb
