#include "rb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rb {

OccupationVector priority_rule(const std::vector<int>& sigma, double alpha, const Vector& m) {
    const int d = static_cast<int>(m.size());
    OccupationVector y(d);
    double remaining = alpha;
    for (int s : sigma) {
        double pour = std::clamp(remaining, 0.0, std::max(m[s], 0.0));
        y.y1[s] = pour;
        remaining -= pour;
    }
    for (int s = 0; s < d; ++s) y.y0[s] = std::max(m[s] - y.y1[s], 0.0);
    return y;
}

OccupationVector water_filling_rule(const WaterFillingEpoch& epoch, const Vector& m) {
    const int d = static_cast<int>(m.size());
    OccupationVector y(d);
    double remaining = epoch.alpha;
    auto pour_into = [&](int s, double cap) {
        double pour = std::clamp(remaining, 0.0, std::max(cap, 0.0));
        y.y1[s] += pour;
        remaining -= pour;
    };
    // pass 1: S+ up to the available mass
    for (int s : epoch.splus_order) pour_into(s, m[s]);
    // pass 2: S0 in reversed enumeration order, capped by min(m_s, y*_{s,1})
    for (auto it = epoch.szero_enum.rbegin(); it != epoch.szero_enum.rend(); ++it)
        pour_into(*it, std::min(m[*it], epoch.ystar1[*it]));
    // pass 3: leftover over S0 (forward), then S-, then Sempty, up to the mass
    for (int s : epoch.szero_enum) pour_into(s, m[s] - y.y1[s]);
    for (int s : epoch.sminus_order) pour_into(s, m[s]);
    for (int s : epoch.sempty_order) pour_into(s, m[s]);
    for (int s = 0; s < d; ++s) y.y0[s] = std::max(m[s] - y.y1[s], 0.0);
    return y;
}

RoundingOutcome randomized_round(const Vector& y1, const ArmPopulationState& pop,
                                 std::mt19937_64& rng) {
    const int d = static_cast<int>(y1.size());
    const double n = static_cast<double>(pop.n);
    RoundingOutcome out;
    out.activations.assign(d, 0);
    Vector residual(d, 0.0);
    double residual_total = 0.0;
    for (int s = 0; s < d; ++s) {
        double target = y1[s] * n;
        if (target > static_cast<double>(pop.counts[s]) + 1e-9)
            throw std::invalid_argument(
                "randomized_round: activation target exceeds the state's arm count");
        target = std::min(target, static_cast<double>(pop.counts[s]));
        // snap near-integers so exact targets stay deterministic
        double rounded = std::nearbyint(target);
        if (std::abs(target - rounded) < 1e-9) target = rounded;
        double base = std::floor(target);
        out.activations[s] = static_cast<long>(base);
        residual[s] = target - base;
        residual_total += residual[s];
    }
    // an integral residual total means the extra-activation count is certain
    double snapped = std::nearbyint(residual_total);
    if (std::abs(residual_total - snapped) < 1e-9) residual_total = snapped;
    int last_nonzero = -1;
    for (int s = 0; s < d; ++s)
        if (residual[s] > 0.0) last_nonzero = s;
    // systematic sampling: points u, u+1, ... in [0, c) hit each state's
    // residual interval at most once (lengths < 1), with P(hit s) = z_s
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double point = unif(rng);
    double cursor = 0.0;
    for (int s = 0; s < d && point < residual_total; ++s) {
        cursor += residual[s];
        if (s == last_nonzero) cursor = residual_total;  // tile [0, c) exactly
        if (point < cursor && residual[s] > 0.0) {
            ++out.activations[s];
            point += 1.0;
        }
    }
    out.budget_used = 0;
    for (int s = 0; s < d; ++s) out.budget_used += out.activations[s];
    return out;
}

namespace {

// Sorts `states` by descending score, ties by ascending state id.
std::vector<int> by_descending_score(std::vector<int> states, const Vector& scores) {
    std::stable_sort(states.begin(), states.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return states;
}

// S0 enumeration: ascending |index| then state id (indices vanish on S0, so
// this is effectively state id; kept explicit for determinism).
std::vector<int> szero_enumeration(std::vector<int> states, const Vector* indices) {
    if (!indices) {
        std::sort(states.begin(), states.end());
        return states;
    }
    std::stable_sort(states.begin(), states.end(), [&](int a, int b) {
        double ia = std::abs((*indices)[a]), ib = std::abs((*indices)[b]);
        if (ia != ib) return ia < ib;
        return a < b;
    });
    return states;
}

WaterFillingEpoch make_epoch_plan(const FiniteLPSolution& solution, int t, double alpha,
                                  const Vector& scores, const Vector* epoch_indices) {
    const Partition& part = solution.partition[t];
    WaterFillingEpoch plan;
    plan.alpha = alpha;
    plan.splus_order = by_descending_score(part.s_plus, scores);
    plan.szero_enum = szero_enumeration(part.s_zero, epoch_indices);
    plan.sminus_order = by_descending_score(part.s_minus, scores);
    plan.sempty_order = by_descending_score(part.s_empty, scores);
    plan.ystar1 = solution.y_star[t].y1;
    return plan;
}

class PriorityPolicy final : public DecisionRule {
  public:
    PriorityPolicy(std::vector<int> sigma, double alpha)
        : sigma_(std::move(sigma)), alpha_(alpha) {}
    OccupationVector decide(int, const Vector& m) override {
        return priority_rule(sigma_, alpha_, m);
    }
    std::unique_ptr<DecisionRule> clone() const override {
        return std::make_unique<PriorityPolicy>(*this);
    }
    std::string name() const override { return "priority"; }

  private:
    std::vector<int> sigma_;
    double alpha_;
};

class WaterFillingPolicy final : public DecisionRule {
  public:
    WaterFillingPolicy(std::vector<WaterFillingEpoch> plans, std::string name)
        : plans_(std::move(plans)), name_(std::move(name)) {}
    OccupationVector decide(int t, const Vector& m) override {
        const auto& plan = plans_[static_cast<std::size_t>(std::min<int>(
            t, static_cast<int>(plans_.size()) - 1))];
        return water_filling_rule(plan, m);
    }
    std::unique_ptr<DecisionRule> clone() const override {
        return std::make_unique<WaterFillingPolicy>(*this);
    }
    std::string name() const override { return name_; }

  private:
    std::vector<WaterFillingEpoch> plans_;
    std::string name_;
};

// Clamps an LP-sourced decision onto the observed measure: solver residuals
// are ~1e-12 on the occupation scale but get multiplied by N downstream, where
// the rounding precondition works on the count scale.
OccupationVector snap_to_measure(OccupationVector y, const Vector& m, double alpha) {
    const int d = y.d();
    double active = 0.0;
    for (int s = 0; s < d; ++s) {
        y.y1[s] = std::clamp(y.y1[s], 0.0, std::max(m[s], 0.0));
        y.y0[s] = std::max(m[s] - y.y1[s], 0.0);
        active += y.y1[s];
    }
    double drift = alpha - active;
    for (int s = 0; s < d && drift != 0.0; ++s) {
        if (drift > 0.0) {
            double pour = std::min(drift, y.y0[s]);
            y.y1[s] += pour;
            y.y0[s] -= pour;
            drift -= pour;
        } else {
            double take = std::min(-drift, y.y1[s]);
            y.y1[s] -= take;
            y.y0[s] += take;
            drift += take;
        }
    }
    return y;
}

class LpUpdatePolicy final : public DecisionRule {
  public:
    LpUpdatePolicy(const RBModel& model, int period) : model_(&model), period_(period) {
        if (period_ < 1) throw std::invalid_argument("lp_update_policy: period must be >= 1");
    }

    OccupationVector decide(int t, const Vector& m) override {
        if (t == 0 || last_update_ < 0 || t - last_update_ >= period_) {
            solution_ = solve_finite_from(*model_, m, t);
            indices_ = finite_lp_indices(*model_, solution_);
            last_update_ = t;
            // the fresh LP's first decision matches m up to solver residuals
            return snap_to_measure(solution_.y_star[0], m, model_->alpha);
        }
        int offset = t - last_update_;
        Vector scores(model_->d);
        for (int s = 0; s < model_->d; ++s) scores[s] = indices_.index(s, offset);
        WaterFillingEpoch plan =
            make_epoch_plan(solution_, offset, model_->alpha, scores, &scores);
        return water_filling_rule(plan, m);
    }

    std::unique_ptr<DecisionRule> clone() const override {
        return std::make_unique<LpUpdatePolicy>(*this);
    }
    std::string name() const override { return "lp-update"; }
    void reset() override { last_update_ = -1; }

  private:
    const RBModel* model_;
    int period_;
    int last_update_ = -1;
    FiniteLPSolution solution_;
    IndexTable indices_;
};

}  // namespace

std::unique_ptr<DecisionRule> priority_policy(const std::vector<int>& sigma, double alpha) {
    return std::make_unique<PriorityPolicy>(sigma, alpha);
}

std::unique_ptr<DecisionRule> water_filling_policy(const FiniteLPSolution& solution, double alpha,
                                                   const Vector& tie_scores,
                                                   const IndexTable* indices) {
    std::vector<WaterFillingEpoch> plans;
    plans.reserve(solution.T);
    for (int t = 0; t < solution.T; ++t) {
        Vector epoch_idx;
        const Vector* idx_ptr = nullptr;
        if (indices) {
            epoch_idx.resize(solution.d);
            for (int s = 0; s < solution.d; ++s) epoch_idx[s] = indices->index(s, t);
            idx_ptr = &epoch_idx;
        }
        plans.push_back(make_epoch_plan(solution, t, alpha, tie_scores, idx_ptr));
    }
    return std::make_unique<WaterFillingPolicy>(std::move(plans), "water-filling");
}

std::unique_ptr<DecisionRule> lp_index_policy(const RBModel& model,
                                              const FiniteLPSolution& solution,
                                              const IndexTable& indices) {
    std::vector<WaterFillingEpoch> plans;
    plans.reserve(solution.T);
    for (int t = 0; t < solution.T; ++t) {
        Vector scores(model.d);
        for (int s = 0; s < model.d; ++s) scores[s] = indices.index(s, t);
        plans.push_back(make_epoch_plan(solution, t, model.alpha, scores, &scores));
    }
    return std::make_unique<WaterFillingPolicy>(std::move(plans), "lp-index");
}

std::unique_ptr<DecisionRule> lp_update_policy(const RBModel& model, int update_period) {
    return std::make_unique<LpUpdatePolicy>(model, update_period);
}

std::vector<int> lp_priority_order(const InfiniteLPSolution& solution, const IndexTable& indices) {
    const Vector& scores = indices.lp_index;
    std::vector<int> order = by_descending_score(solution.partition.s_plus, scores);
    std::vector<int> zero = szero_enumeration(solution.partition.s_zero, &scores);
    order.insert(order.end(), zero.begin(), zero.end());
    std::vector<int> minus = by_descending_score(solution.partition.s_minus, scores);
    order.insert(order.end(), minus.begin(), minus.end());
    std::vector<int> empty = by_descending_score(solution.partition.s_empty, scores);
    order.insert(order.end(), empty.begin(), empty.end());
    return order;
}

std::unique_ptr<DecisionRule> lp_priority_policy_infinite(const RBModel& model,
                                                          const InfiniteLPSolution& solution,
                                                          const IndexTable& indices) {
    return priority_policy(lp_priority_order(solution, indices), model.alpha);
}

}  // namespace rb
