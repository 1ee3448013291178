#include "rb/lp.hpp"

#include <limits>

namespace rb {

const char* to_string(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
        case LPStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kRefactorPeriod = 100;

// Two-phase revised simplex over columns stored contiguously (a_cols is the
// transposed constraint matrix). The basis inverse is kept explicitly and
// rebuilt every kRefactorPeriod pivots. Column j >= n is the artificial of row
// j - n; artificials are never priced, so they cannot re-enter once out.
class SimplexSolver {
  public:
    explicit SimplexSolver(const LinearProgram& lp)
        : m_(lp.num_constraints()),
          n_(lp.num_vars()),
          minimize_(lp.sense == LinearProgram::Sense::minimize),
          a_cols_(lp.num_vars(), lp.num_constraints()),
          b_(lp.b),
          cost_(lp.objective),
          row_flip_(lp.num_constraints(), 1.0) {
        for (int i = 0; i < m_; ++i) {
            if (b_[i] < 0.0) {
                b_[i] = -b_[i];
                row_flip_[i] = -1.0;
            }
        }
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < m_; ++i) a_cols_(j, i) = row_flip_[i] * lp.a(i, j);
        if (minimize_)
            for (double& c : cost_) c = -c;
    }

    LPResult run(const LinearProgram& lp) {
        LPResult result;
        basis_.resize(m_);
        in_basis_.assign(n_, 0);
        binv_ = Matrix::identity(m_);
        xb_ = b_;
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;

        // Phase 1: drive artificial mass to zero.
        phase_cost_.assign(n_ + m_, 0.0);
        for (int i = 0; i < m_; ++i) phase_cost_[n_ + i] = -1.0;
        LPStatus st = iterate();
        if (st != LPStatus::optimal) {
            result.status = st == LPStatus::unbounded ? LPStatus::numerical_failure : st;
            return result;
        }
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) infeas += std::max(xb_[i], 0.0);
        double b_scale = 1.0 + max_abs(b_);
        if (infeas > kFeasTol * b_scale) {
            result.status = LPStatus::infeasible;
            return result;
        }
        if (!drive_out_artificials()) {
            result.status = LPStatus::numerical_failure;
            return result;
        }

        // Phase 2: the real objective; artificials left on redundant rows keep
        // zero cost and zero value.
        phase_cost_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) phase_cost_[j] = cost_[j];
        bland_ = false;
        degenerate_run_ = 0;
        st = iterate();
        if (st != LPStatus::optimal) {
            result.status = st;
            return result;
        }
        if (!refactorize()) {
            result.status = LPStatus::numerical_failure;
            return result;
        }
        compute_duals();

        extract(result, lp);
        return result;
    }

  private:
    int m_, n_;
    bool minimize_;
    Matrix a_cols_;  // n x m, row j = constraint column of variable j
    Vector b_;
    Vector cost_;
    Vector row_flip_;

    std::vector<int> basis_;
    std::vector<char> in_basis_;
    Matrix binv_;
    Vector xb_;
    Vector duals_;
    Vector phase_cost_;
    Vector work_;
    long pivots_ = 0;
    int degenerate_run_ = 0;
    bool bland_ = false;
    int price_cursor_ = 0;

    std::span<const double> column(int j) const { return a_cols_.row(j); }

    void compute_duals() {
        duals_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double cb = phase_cost_[basis_[r]];
            if (cb == 0.0) continue;
            auto row = binv_.row(r);
            for (int i = 0; i < m_; ++i) duals_[i] += cb * row[i];
        }
    }

    double reduced_cost(int j) const { return phase_cost_[j] - dot(duals_, column(j)); }

    // Entering column, or -1 at optimality. Partial pricing scans blocks from a
    // rotating cursor; Bland mode takes the lowest eligible index instead.
    int price() {
        if (bland_) {
            for (int j = 0; j < n_; ++j)
                if (!in_basis_[j] && reduced_cost(j) > kReducedCostTol) return j;
            return -1;
        }
        const int block = std::max(64, n_ / 8);
        int scanned = 0;
        while (scanned < n_) {
            int start = price_cursor_;
            int end = std::min(start + block, n_);
            int best = -1;
            double best_rc = kReducedCostTol;
            for (int j = start; j < end; ++j) {
                if (in_basis_[j]) continue;
                double rc = reduced_cost(j);
                if (rc > best_rc) {
                    best_rc = rc;
                    best = j;
                }
            }
            scanned += end - start;
            price_cursor_ = end >= n_ ? 0 : end;
            if (best >= 0) return best;
        }
        return -1;
    }

    // Leaving row for entering column direction work_; -1 when unbounded.
    int ratio_test() const {
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m_; ++i) {
            if (work_[i] <= kPivotTol) continue;
            double ratio = std::max(xb_[i], 0.0) / work_[i];
            if (ratio < best - kDegenerateStep ||
                (ratio < best + kDegenerateStep && (leave < 0 || basis_[i] < basis_[leave]))) {
                best = ratio;
                leave = i;
            }
        }
        return leave;
    }

    void apply_pivot(int enter, int leave) {
        double piv = work_[leave];
        auto lrow = binv_.row(leave);
        for (int c = 0; c < m_; ++c) lrow[c] /= piv;
        xb_[leave] /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            double f = work_[i];
            if (f == 0.0) continue;
            auto irow = binv_.row(i);
            for (int c = 0; c < m_; ++c) irow[c] -= f * lrow[c];
            xb_[i] -= f * xb_[leave];
        }
        if (basis_[leave] < n_) in_basis_[basis_[leave]] = 0;
        basis_[leave] = enter;
        in_basis_[enter] = 1;
        ++pivots_;
        if (pivots_ % kRefactorPeriod == 0) refactorize();
    }

    void direction(int j) {
        work_.assign(m_, 0.0);
        auto col = column(j);
        for (int i = 0; i < m_; ++i) work_[i] = dot(binv_.row(i), col);
    }

    LPStatus iterate() {
        const long cap = 2000 + 200L * (m_ + n_);
        for (;;) {
            if (pivots_ > cap) return LPStatus::numerical_failure;
            compute_duals();
            int enter = price();
            if (enter < 0) return LPStatus::optimal;
            direction(enter);
            int leave = ratio_test();
            if (leave < 0) return LPStatus::unbounded;
            double step = std::max(xb_[leave], 0.0) / work_[leave];
            if (step <= kDegenerateStep) {
                if (++degenerate_run_ > 4 * (m_ + 16)) bland_ = true;
            } else {
                degenerate_run_ = 0;
                bland_ = false;
            }
            apply_pivot(enter, leave);
        }
    }

    // Pivot structural columns onto rows still carrying an artificial. Rows
    // where every structural entry is zero are redundant; their artificial
    // stays basic at level zero.
    bool drive_out_artificials() {
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < n_) continue;
            if (std::abs(xb_[r]) > kFeasTol * (1.0 + max_abs(b_))) return false;
            int found = -1;
            for (int j = 0; j < n_ && found < 0; ++j) {
                if (in_basis_[j]) continue;
                if (std::abs(dot(binv_.row(r), column(j))) > 1e-7) found = j;
            }
            if (found < 0) continue;
            direction(found);
            if (std::abs(work_[r]) <= kPivotTol) continue;
            xb_[r] = 0.0;
            apply_pivot(found, r);
        }
        return true;
    }

    bool refactorize() {
        // Gauss-Jordan inverse of the basis matrix with partial pivoting.
        Matrix b_mat(m_, m_);
        for (int k = 0; k < m_; ++k) {
            int j = basis_[k];
            if (j >= n_) {
                b_mat(j - n_, k) = 1.0;
            } else {
                auto col = column(j);
                for (int i = 0; i < m_; ++i) b_mat(i, k) = col[i];
            }
        }
        Matrix inv = Matrix::identity(m_);
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            double best = std::abs(b_mat(col, col));
            for (int r = col + 1; r < m_; ++r) {
                double v = std::abs(b_mat(r, col));
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-13) return false;
            if (piv != col) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(b_mat(piv, c), b_mat(col, c));
                    std::swap(inv(piv, c), inv(col, c));
                }
            }
            double p = b_mat(col, col);
            for (int c = 0; c < m_; ++c) {
                b_mat(col, c) /= p;
                inv(col, c) /= p;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = b_mat(r, col);
                if (f == 0.0) continue;
                for (int c = 0; c < m_; ++c) {
                    b_mat(r, c) -= f * b_mat(col, c);
                    inv(r, c) -= f * inv(col, c);
                }
            }
        }
        // inv now holds (columns-of-basis)^-1 in the basis ordering
        binv_ = std::move(inv);
        for (int i = 0; i < m_; ++i) xb_[i] = dot(binv_.row(i), b_);
        return true;
    }

    void extract(LPResult& result, const LinearProgram& lp) {
        result.primal.assign(n_, 0.0);
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] >= n_) continue;
            result.primal[basis_[r]] = std::max(xb_[r], 0.0);
        }
        result.dual.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double lambda = duals_[i] * row_flip_[i];
            result.dual[i] = minimize_ ? -lambda : lambda;
        }
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += lp.objective[j] * result.primal[j];
        result.objective = obj;

        Vector residual(lp.b);
        for (double& v : residual) v = -v;
        for (int j = 0; j < n_; ++j) {
            double x = result.primal[j];
            if (x == 0.0) continue;
            for (int i = 0; i < m_; ++i) residual[i] += x * lp.a(i, j);
        }
        result.max_primal_residual = max_abs(residual);
        result.duality_gap = std::abs(obj - dot(result.dual, lp.b));
        result.basic = true;
        result.iterations = static_cast<int>(pivots_);
        result.status = result.max_primal_residual <= 1e-6 ? LPStatus::optimal
                                                           : LPStatus::numerical_failure;
    }
};

}  // namespace

LPResult solve(const LinearProgram& lp) {
    if (lp.a.rows != static_cast<int>(lp.b.size()) || lp.a.cols != lp.num_vars())
        throw std::invalid_argument("solve: inconsistent LP dimensions");
    SimplexSolver solver(lp);
    return solver.run(lp);
}

}  // namespace rb
