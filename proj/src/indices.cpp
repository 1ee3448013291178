#include "rb/indices.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rb {

FiniteDpTable finite_lp_q_values(const RBModel& model, const FiniteLPSolution& solution) {
    const int d = model.d;
    const int T = solution.T;
    FiniteDpTable dp;
    dp.d = d;
    dp.T = T;
    dp.q0.assign(static_cast<std::size_t>(T) * d, 0.0);
    dp.q1.assign(static_cast<std::size_t>(T) * d, 0.0);
    dp.v.assign(static_cast<std::size_t>(T + 1) * d, 0.0);  // terminal row zero
    const int offset = model.horizon.T - T;  // remaining-horizon tables start here
    for (int t = T - 1; t >= 0; --t) {
        const Vector& rw0 = model.reward(0, offset + t);
        const Vector& rw1 = model.reward(1, offset + t);
        const Matrix& k0 = model.kernel(0, offset + t);
        const Matrix& k1 = model.kernel(1, offset + t);
        double gamma = solution.gamma[t];
        for (int s = 0; s < d; ++s) {
            double cont0 = 0.0, cont1 = 0.0;
            for (int sp = 0; sp < d; ++sp) {
                cont0 += k0(s, sp) * dp.v[static_cast<std::size_t>(t + 1) * d + sp];
                cont1 += k1(s, sp) * dp.v[static_cast<std::size_t>(t + 1) * d + sp];
            }
            double q0 = rw0[s] + cont0;
            double q1 = rw1[s] - gamma + cont1;
            dp.q0[static_cast<std::size_t>(t) * d + s] = q0;
            dp.q1[static_cast<std::size_t>(t) * d + s] = q1;
            dp.v[static_cast<std::size_t>(t) * d + s] = std::max(q0, q1);
        }
    }
    return dp;
}

IndexTable finite_lp_indices(const RBModel& model, const FiniteLPSolution& solution) {
    FiniteDpTable dp = finite_lp_q_values(model, solution);
    IndexTable table;
    table.finite = true;
    table.d = dp.d;
    table.T = dp.T;
    table.lp_index.resize(dp.q0.size());
    for (std::size_t i = 0; i < dp.q0.size(); ++i) table.lp_index[i] = dp.q1[i] - dp.q0[i];
    return table;
}

RviResult relative_value_iteration(const Matrix& p0, const Matrix& p1, const Vector& r0,
                                   const Vector& r1, double gamma, const Vector* warm_start,
                                   double span_tol, long max_iterations) {
    const int d = p0.rows;
    constexpr double tau = 0.5;
    RviResult out;
    Vector v = warm_start && static_cast<int>(warm_start->size()) == d ? *warm_start
                                                                       : Vector(d, 0.0);
    Vector w(d, 0.0);
    for (long it = 0; it < max_iterations; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int s = 0; s < d; ++s) {
            double q0 = r0[s] + dot(p0.row(s), v);
            double q1 = r1[s] - gamma + dot(p1.row(s), v);
            double bellman = std::max(q0, q1);
            w[s] = (1.0 - tau) * v[s] + tau * bellman;
            double diff = w[s] - v[s];
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
        }
        double base = w[0];
        for (int s = 0; s < d; ++s) v[s] = w[s] - base;
        if (hi - lo <= span_tol) {
            out.converged = true;
            out.gain = 0.5 * (hi + lo) / tau;
            out.iterations = it + 1;
            break;
        }
    }
    if (!out.converged) out.iterations = max_iterations;
    out.v = std::move(v);
    return out;
}

namespace {

struct InfiniteQ {
    Vector q0, q1;
};

InfiniteQ infinite_q_values(const RBModel& model, double gamma, const Vector* warm,
                            Vector* v_out) {
    const Matrix& k0 = model.kernel(0, 0);
    const Matrix& k1 = model.kernel(1, 0);
    const Vector& rw0 = model.reward(0, 0);
    const Vector& rw1 = model.reward(1, 0);
    RviResult rvi = relative_value_iteration(k0, k1, rw0, rw1, gamma, warm);
    if (!rvi.converged)
        throw std::runtime_error(
            "relative value iteration did not converge; the model is likely not unichain");
    const int d = model.d;
    InfiniteQ q;
    q.q0.resize(d);
    q.q1.resize(d);
    for (int s = 0; s < d; ++s) {
        q.q0[s] = rw0[s] + dot(k0.row(s), rvi.v);
        q.q1[s] = rw1[s] - gamma + dot(k1.row(s), rvi.v);
    }
    if (v_out) *v_out = std::move(rvi.v);
    return q;
}

}  // namespace

IndexTable infinite_lp_indices(const RBModel& model, const InfiniteLPSolution& solution) {
    IndexTable table;
    table.finite = false;
    table.d = model.d;
    table.T = 1;
    InfiniteQ q = infinite_q_values(model, solution.gamma_star, nullptr, nullptr);
    table.lp_index.resize(model.d);
    for (int s = 0; s < model.d; ++s) table.lp_index[s] = q.q1[s] - q.q0[s];
    return table;
}

IndexTable whittle_indices(const RBModel& model) {
    if (model.horizon.is_finite())
        throw std::invalid_argument("whittle_indices: model must have an infinite horizon");
    const int d = model.d;
    const Vector& rw0 = model.reward(0, 0);
    const Vector& rw1 = model.reward(1, 0);
    double r_lo = std::min(*std::min_element(rw0.begin(), rw0.end()),
                           *std::min_element(rw1.begin(), rw1.end()));
    double r_hi = std::max(*std::max_element(rw0.begin(), rw0.end()),
                           *std::max_element(rw1.begin(), rw1.end()));
    double range = std::max(r_hi - r_lo, 1e-6);
    double gap_lo = rw1[0] - rw0[0], gap_hi = gap_lo;
    for (int s = 1; s < d; ++s) {
        gap_lo = std::min(gap_lo, rw1[s] - rw0[s]);
        gap_hi = std::max(gap_hi, rw1[s] - rw0[s]);
    }
    // outside this bracket one action dominates uniformly
    const double lo_bracket = gap_lo - 2.0 * range;
    const double hi_bracket = gap_hi + 2.0 * range;

    Vector warm;
    std::vector<double> probed;
    // active set membership with ties resolved toward active
    auto member = [&](double gamma, int s) {
        InfiniteQ q = infinite_q_values(model, gamma, warm.empty() ? nullptr : &warm, &warm);
        probed.push_back(gamma);
        return q.q1[s] - q.q0[s] >= 0.0;
    };

    IndexTable table;
    table.finite = false;
    table.d = d;
    table.T = 1;
    table.has_whittle = true;
    table.whittle.assign(d, 0.0);
    for (int s = 0; s < d; ++s) {
        double lo = lo_bracket, hi = hi_bracket;
        if (member(hi, s)) {
            table.whittle[s] = hi;  // bracket never binds on admissible rewards
            continue;
        }
        if (!member(lo, s)) {
            table.whittle[s] = lo;
            continue;
        }
        while (hi - lo > 1e-6) {
            double mid = 0.5 * (lo + hi);
            if (member(mid, s))
                lo = mid;
            else
                hi = mid;
        }
        table.whittle[s] = 0.5 * (lo + hi);
    }

    // numerical indexability scan: active sets must shrink as gamma grows
    std::vector<double> grid = probed;
    for (int k = 0; k < 200; ++k)
        grid.push_back(lo_bracket + (hi_bracket - lo_bracket) * k / 199.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<char> prev(d, 1);
    bool indexable = true;
    warm.clear();
    for (double gamma : grid) {
        InfiniteQ q = infinite_q_values(model, gamma, warm.empty() ? nullptr : &warm, &warm);
        for (int s = 0; s < d; ++s) {
            bool in = q.q1[s] - q.q0[s] >= 0.0;
            if (in && !prev[s]) indexable = false;  // re-entered after leaving
            prev[s] = in ? 1 : 0;
        }
    }
    table.indexable = indexable;
    table.whittle_reliable = indexable;
    return table;
}

}  // namespace rb
