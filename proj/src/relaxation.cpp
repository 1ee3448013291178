#include "rb/relaxation.hpp"

#include <stdexcept>

namespace rb {

Partition Partition::from_occupation(const OccupationVector& y, double eps) {
    Partition p;
    for (int s = 0; s < y.d(); ++s) {
        bool active = y.y1[s] > eps;
        bool passive = y.y0[s] > eps;
        if (active && !passive)
            p.s_plus.push_back(s);
        else if (active && passive)
            p.s_zero.push_back(s);
        else if (!active && passive)
            p.s_minus.push_back(s);
        else
            p.s_empty.push_back(s);
    }
    return p;
}

int Partition::set_of(int s) const {
    for (int x : s_plus)
        if (x == s) return 0;
    for (int x : s_zero)
        if (x == s) return 1;
    for (int x : s_minus)
        if (x == s) return 2;
    return 3;
}

const char* Partition::set_name(int s) const {
    switch (set_of(s)) {
        case 0: return "S+";
        case 1: return "S0";
        case 2: return "S-";
        default: return "Sempty";
    }
}

namespace {

inline int var_index(int d, int t, int s, int a) { return 2 * (t * d + s) + a; }

void require_valid(const RBModel& model) {
    auto report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("relaxation: invalid model (" + report.first()->invariant +
                                    ": " + report.first()->detail + ")");
}

FiniteLPSolution extract_finite(const RBModel& model, int T, const Vector& m_init,
                                const LPResult& lp_result) {
    FiniteLPSolution sol;
    sol.d = model.d;
    sol.T = T;
    sol.value = lp_result.objective;
    sol.gamma.assign(lp_result.dual.begin(), lp_result.dual.begin() + T);
    sol.y_star.reserve(T);
    for (int t = 0; t < T; ++t) {
        OccupationVector y(model.d);
        for (int s = 0; s < model.d; ++s) {
            y.y0[s] = lp_result.primal[var_index(model.d, t, s, 0)];
            y.y1[s] = lp_result.primal[var_index(model.d, t, s, 1)];
        }
        sol.m_star.push_back(y.marginal());
        sol.partition.push_back(Partition::from_occupation(y));
        sol.y_star.push_back(std::move(y));
    }
    // sanity on the contract every consumer relies on
    for (int t = 0; t < T; ++t) {
        if (std::abs(sum(sol.y_star[t].y1) - model.alpha) > 1e-6)
            throw std::runtime_error("relaxation: budget row violated beyond tolerance");
    }
    if (l1_distance(sol.m_star[0], m_init) > 1e-6)
        throw std::runtime_error("relaxation: initial condition violated beyond tolerance");
    return sol;
}

LinearProgram build_finite_lp_from(const RBModel& model, const Vector& m_init, int start_epoch,
                                   LinearProgram::Sense sense) {
    const int d = model.d;
    const int T = model.horizon.T - start_epoch;
    LinearProgram lp;
    lp.sense = sense;
    const int nv = 2 * d * T;
    const int nc = T + d * T;  // budget rows, then init, then flow per epoch
    lp.objective.assign(nv, 0.0);
    lp.a = Matrix(nc, nv);
    lp.b.assign(nc, 0.0);

    for (int t = 0; t < T; ++t) {
        const Vector& rw0 = model.reward(0, start_epoch + t);
        const Vector& rw1 = model.reward(1, start_epoch + t);
        for (int s = 0; s < d; ++s) {
            lp.objective[var_index(d, t, s, 0)] = rw0[s];
            lp.objective[var_index(d, t, s, 1)] = rw1[s];
        }
    }
    // budget rows 0..T-1
    for (int t = 0; t < T; ++t) {
        for (int s = 0; s < d; ++s) lp.a(t, var_index(d, t, s, 1)) = 1.0;
        lp.b[t] = model.alpha;
    }
    // initial-condition rows T..T+d-1
    for (int s = 0; s < d; ++s) {
        lp.a(T + s, var_index(d, 0, s, 0)) = 1.0;
        lp.a(T + s, var_index(d, 0, s, 1)) = 1.0;
        lp.b[T + s] = m_init[s];
    }
    // flow rows: state marginal at t equals the pushforward of y(t-1)
    for (int t = 1; t < T; ++t) {
        const Matrix& k0 = model.kernel(0, start_epoch + t - 1);
        const Matrix& k1 = model.kernel(1, start_epoch + t - 1);
        for (int s = 0; s < d; ++s) {
            int row = T + d + (t - 1) * d + s;
            lp.a(row, var_index(d, t, s, 0)) = 1.0;
            lp.a(row, var_index(d, t, s, 1)) = 1.0;
            for (int sp = 0; sp < d; ++sp) {
                lp.a(row, var_index(d, t - 1, sp, 0)) -= k0(sp, s);
                lp.a(row, var_index(d, t - 1, sp, 1)) -= k1(sp, s);
            }
        }
    }
    return lp;
}

}  // namespace

LinearProgram build_finite_lp(const RBModel& model, LinearProgram::Sense sense) {
    return build_finite_lp_from(model, model.m0, 0, sense);
}

LinearProgram build_infinite_lp(const RBModel& model) {
    const int d = model.d;
    LinearProgram lp;
    lp.sense = LinearProgram::Sense::maximize;
    const int nv = 2 * d;
    lp.objective.assign(nv, 0.0);
    lp.a = Matrix(d + 2, nv);
    lp.b.assign(d + 2, 0.0);
    const Matrix& k0 = model.kernel(0, 0);
    const Matrix& k1 = model.kernel(1, 0);
    const Vector& rw0 = model.reward(0, 0);
    const Vector& rw1 = model.reward(1, 0);
    for (int s = 0; s < d; ++s) {
        lp.objective[2 * s] = rw0[s];
        lp.objective[2 * s + 1] = rw1[s];
    }
    // row 0: budget
    for (int s = 0; s < d; ++s) lp.a(0, 2 * s + 1) = 1.0;
    lp.b[0] = model.alpha;
    // rows 1..d: stationarity (one row is linearly dependent; the solver copes)
    for (int s = 0; s < d; ++s) {
        lp.a(1 + s, 2 * s) += 1.0;
        lp.a(1 + s, 2 * s + 1) += 1.0;
        for (int sp = 0; sp < d; ++sp) {
            lp.a(1 + s, 2 * sp) -= k0(sp, s);
            lp.a(1 + s, 2 * sp + 1) -= k1(sp, s);
        }
    }
    // last row: total mass
    for (int j = 0; j < nv; ++j) lp.a(d + 1, j) = 1.0;
    lp.b[d + 1] = 1.0;
    return lp;
}

namespace {

FiniteLPSolution solve_finite_sense(const RBModel& model, LinearProgram::Sense sense) {
    require_valid(model);
    if (!model.horizon.is_finite())
        throw std::invalid_argument("solve_finite: model must have a finite horizon");
    LinearProgram lp = build_finite_lp(model, sense);
    LPResult res = solve(lp);
    if (res.status != LPStatus::optimal)
        throw std::runtime_error(std::string("solve_finite: LP not optimal (") +
                                 to_string(res.status) + "), which cannot happen for a valid model");
    return extract_finite(model, model.horizon.T, model.m0, res);
}

}  // namespace

FiniteLPSolution solve_finite(const RBModel& model) {
    return solve_finite_sense(model, LinearProgram::Sense::maximize);
}

FiniteLPSolution solve_finite_min(const RBModel& model) {
    return solve_finite_sense(model, LinearProgram::Sense::minimize);
}

FiniteLPSolution solve_finite_from(const RBModel& model, const Vector& m_init, int start_epoch) {
    if (!model.horizon.is_finite())
        throw std::invalid_argument("solve_finite_from: model must have a finite horizon");
    if (start_epoch < 0 || start_epoch >= model.horizon.T)
        throw std::invalid_argument("solve_finite_from: start epoch out of range");
    LinearProgram lp =
        build_finite_lp_from(model, m_init, start_epoch, LinearProgram::Sense::maximize);
    LPResult res = solve(lp);
    if (res.status != LPStatus::optimal)
        throw std::runtime_error(std::string("solve_finite_from: LP not optimal (") +
                                 to_string(res.status) + ")");
    return extract_finite(model, model.horizon.T - start_epoch, m_init, res);
}

InfiniteLPSolution solve_infinite(const RBModel& model) {
    require_valid(model);
    if (model.horizon.is_finite())
        throw std::invalid_argument("solve_infinite: model must have an infinite horizon");
    if (!model.stationary())
        throw std::invalid_argument("solve_infinite: per-epoch parameters need a finite horizon");
    LinearProgram lp = build_infinite_lp(model);
    LPResult res = solve(lp);
    if (res.status != LPStatus::optimal)
        throw std::runtime_error(std::string("solve_infinite: LP not optimal (") +
                                 to_string(res.status) + ")");
    InfiniteLPSolution sol;
    sol.d = model.d;
    sol.value = res.objective;
    sol.gamma_star = res.dual[0];
    OccupationVector y(model.d);
    for (int s = 0; s < model.d; ++s) {
        y.y0[s] = res.primal[2 * s];
        y.y1[s] = res.primal[2 * s + 1];
    }
    sol.m_star = y.marginal();
    sol.partition = Partition::from_occupation(y);
    sol.y_star = std::move(y);
    if (std::abs(sum(sol.y_star.y1) - model.alpha) > 1e-6)
        throw std::runtime_error("solve_infinite: budget row violated beyond tolerance");
    return sol;
}

namespace {

Classification classify_sizes(std::vector<int> sizes) {
    Classification c;
    c.rankable_witness = true;
    c.non_degenerate_witness = true;
    c.degenerate_witness = false;
    for (int z : sizes) {
        if (z > 1) c.rankable_witness = false;
        if (z < 1) {
            c.non_degenerate_witness = false;
            c.degenerate_witness = true;
        }
    }
    c.szero_sizes = std::move(sizes);
    return c;
}

}  // namespace

Classification classify(const FiniteLPSolution& solution) {
    std::vector<int> sizes;
    sizes.reserve(solution.partition.size());
    for (const auto& p : solution.partition) sizes.push_back(static_cast<int>(p.s_zero.size()));
    return classify_sizes(std::move(sizes));
}

Classification classify(const InfiniteLPSolution& solution) {
    return classify_sizes({static_cast<int>(solution.partition.s_zero.size())});
}

}  // namespace rb
