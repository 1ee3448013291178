#pragma once

// Test-only oracles, independent of the library's solver paths: closed forms,
// exhaustive vertex enumeration, and stationary-policy brute force. Expected
// values in the test files were produced by these.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rb/math.hpp"

namespace rb::oracle {

// Closed-form randomization level of the two-state degenerate instance:
// beta* = 0.5 (q1 + p2 - 1) / ((q1 + p2) - (p1 + q2)); the relaxation optimum
// is beta* + 0.5. Valid when q1 + p2 > 1 + p1 + q2.
inline double beta_star(double p1, double p2, double q1, double q2) {
    return 0.5 * (q1 + p2 - 1.0) / ((q1 + p2) - (p1 + q2));
}

inline double degenerate_lp_value(double p1, double p2, double q1, double q2) {
    return beta_star(p1, p2, q1, q2) + 0.5;
}

// Gaussian elimination solve of a dense square system; returns false when the
// matrix is numerically singular.
inline bool gauss_solve(Matrix a, Vector b, Vector& x) {
    const int n = a.rows;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > best) {
                best = std::abs(a(r, col));
                piv = r;
            }
        }
        if (best < 1e-12) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return true;
}

// Exhaustive basic-solution enumeration for tiny equality-form LPs
// (maximize c.x, a x = b, x >= 0). Returns the best vertex objective, or
// nothing when no feasible basis exists. Exponential; keep num_vars small.
inline std::optional<double> enumerate_lp_max(const Vector& c, const Matrix& a, const Vector& b) {
    const int m = a.rows, n = a.cols;
    std::vector<int> cols(m);
    std::optional<double> best;
    // iterate over all m-subsets of columns
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    auto advance = [&]() -> bool {
        int i = m - 1;
        while (i >= 0 && idx[i] == n - m + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
        return true;
    };
    if (n < m) return best;
    do {
        Matrix basis(m, m);
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < m; ++k) basis(r, k) = a(r, idx[k]);
        Vector xb;
        if (!gauss_solve(basis, b, xb)) continue;
        bool feasible = true;
        for (double v : xb)
            if (v < -1e-9) {
                feasible = false;
                break;
            }
        if (!feasible) continue;
        double obj = 0.0;
        for (int k = 0; k < m; ++k) obj += c[idx[k]] * xb[k];
        if (!best || obj > *best + 0.0) best = std::max(best.value_or(obj), obj);
    } while (advance());
    return best;
}

// Stationary distribution of a 2x2 row-stochastic kernel.
inline Vector stationary_2(const Matrix& k) {
    double a = k(0, 1), b = k(1, 0);  // leave rates
    if (a + b < 1e-14) return {0.5, 0.5};
    return {b / (a + b), a / (a + b)};
}

// Brute-force infinite-horizon relaxation for d = 2: scan stationary randomized
// single-arm policies (activation probability per state), solve the budget
// equation along one coordinate, and keep the best feasible average reward.
// Returns (value, activation probabilities).
struct BruteInfinite2 {
    double value = -std::numeric_limits<double>::infinity();
    double psi0 = 0.0, psi1 = 0.0;
};

inline BruteInfinite2 brute_force_infinite_2(const Matrix& p0, const Matrix& p1, const Vector& r0,
                                             const Vector& r1, double alpha, int grid = 4001) {
    BruteInfinite2 best;
    auto evaluate = [&](double psi_a, double psi_b) {
        Matrix k(2, 2);
        for (int s = 0; s < 2; ++s) {
            double psi = s == 0 ? psi_a : psi_b;
            for (int t = 0; t < 2; ++t) k(s, t) = (1.0 - psi) * p0(s, t) + psi * p1(s, t);
        }
        Vector mu = stationary_2(k);
        double active = mu[0] * psi_a + mu[1] * psi_b;
        double value = mu[0] * (psi_a * r1[0] + (1 - psi_a) * r0[0]) +
                       mu[1] * (psi_b * r1[1] + (1 - psi_b) * r0[1]);
        return std::pair<double, double>{active, value};
    };
    // Fix the probability of one state on a grid (endpoints included, so pure
    // actions are hit exactly), solve the budget equation along the other
    // coordinate by sign scan + bisection, keep the best feasible value. Both
    // orientations are scanned so the single randomized state can be either.
    auto scan_with_fixed = [&](bool fix_first) {
        for (int i = 0; i < grid; ++i) {
            double fixed = static_cast<double>(i) / (grid - 1);
            const int scan = 400;
            auto active_gap = [&](double free) {
                return (fix_first ? evaluate(fixed, free) : evaluate(free, fixed)).first - alpha;
            };
            double prev_free = 0.0;
            double prev_gap = active_gap(0.0);
            for (int j = 1; j <= scan; ++j) {
                double free = static_cast<double>(j) / scan;
                double gap = active_gap(free);
                if (std::abs(prev_gap) < 1e-12 || prev_gap * gap <= 0.0) {
                    double lo = prev_free, hi = free, glo = prev_gap;
                    for (int it = 0; it < 60; ++it) {
                        double mid = 0.5 * (lo + hi);
                        double gm = active_gap(mid);
                        if ((glo <= 0) == (gm <= 0)) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    double root = 0.5 * (lo + hi);
                    double psi0 = fix_first ? fixed : root;
                    double psi1 = fix_first ? root : fixed;
                    auto [active, value] = evaluate(psi0, psi1);
                    if (std::abs(active - alpha) < 1e-6 && value > best.value) {
                        best.value = value;
                        best.psi0 = psi0;
                        best.psi1 = psi1;
                    }
                }
                prev_free = free;
                prev_gap = gap;
            }
        }
    };
    scan_with_fixed(true);
    scan_with_fixed(false);
    return best;
}

}  // namespace rb::oracle
