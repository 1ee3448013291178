#include "rb/simulate.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace rb {

Vector phi(const Matrix& p0, const Matrix& p1, const OccupationVector& y) {
    const int d = p0.rows;
    Vector out(d, 0.0);
    for (int sp = 0; sp < d; ++sp) {
        double w0 = y.y0[sp], w1 = y.y1[sp];
        if (w0 != 0.0) {
            auto row = p0.row(sp);
            for (int s = 0; s < d; ++s) out[s] += w0 * row[s];
        }
        if (w1 != 0.0) {
            auto row = p1.row(sp);
            for (int s = 0; s < d; ++s) out[s] += w1 * row[s];
        }
    }
    return out;
}

Vector phi(const RBModel& model, int t, const OccupationVector& y) {
    return phi(model.kernel(0, t), model.kernel(1, t), y);
}

namespace {

// Count-wise one-step transition: a multinomial draw per (state, action) group.
std::vector<long> step_counts(const std::vector<long>& counts, const std::vector<long>& active,
                              const Matrix& k0, const Matrix& k1, std::mt19937_64& rng) {
    const int d = static_cast<int>(counts.size());
    std::vector<long> next(d, 0);
    for (int s = 0; s < d; ++s) {
        long a = active[s];
        long p = counts[s] - a;
        if (a > 0) sample_multinomial(rng, a, k1.row(s), next);
        if (p > 0) sample_multinomial(rng, p, k0.row(s), next);
    }
    return next;
}

double epoch_reward(const std::vector<long>& counts, const std::vector<long>& active,
                    const Vector& r0, const Vector& r1) {
    double total = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        total += static_cast<double>(active[s]) * r1[s] +
                 static_cast<double>(counts[s] - active[s]) * r0[s];
    }
    return total;
}

ValueEstimate estimate_from(const Vector& values) {
    MeanCi ci = mean_ci(values);
    return {ci.mean, ci.half_width, static_cast<int>(ci.n)};
}

}  // namespace

SimulationResult simulate_policy(const RBModel& model, const DecisionRule& rule, long n,
                                 int replications, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_policy: n must be positive");
    if (!model.horizon.is_finite())
        throw std::invalid_argument("simulate_policy: finite-horizon models only");
    const int T = model.horizon.T;
    const ArmPopulationState init = apportion(model.m0, n);

    SimulationResult result;
    Vector values(replications, 0.0);
    for (int rep = 0; rep < replications; ++rep) {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(rep));
        auto policy = rule.clone();
        policy->reset();
        std::vector<long> counts = init.counts;
        double total = 0.0;
        for (int t = 0; t < T; ++t) {
            Vector m(model.d);
            for (int s = 0; s < model.d; ++s)
                m[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
            OccupationVector y = policy->decide(t, m);
            RoundingOutcome round = randomized_round(y.y1, {counts, n}, rng);
            total += epoch_reward(counts, round.activations, model.reward(0, t),
                                  model.reward(1, t));
            if (rep == 0) {
                result.sample.counts.push_back(counts);
                result.sample.activations.push_back(round.activations);
            }
            if (t + 1 < T)
                counts = step_counts(counts, round.activations, model.kernel(0, t),
                                     model.kernel(1, t), rng);
        }
        values[rep] = total / static_cast<double>(n);
        if (rep == 0) result.sample.reward_per_arm = values[rep];
    }
    result.value = estimate_from(values);
    return result;
}

ValueEstimate simulate_policy_infinite(const RBModel& model, const DecisionRule& rule, long n,
                                       int burn_in, int horizon, int replications,
                                       std::uint64_t seed) {
    if (n < 1 || horizon < 1)
        throw std::invalid_argument("simulate_policy_infinite: n and horizon must be positive");
    const ArmPopulationState init = apportion(model.m0, n);
    const Matrix& k0 = model.kernel(0, 0);
    const Matrix& k1 = model.kernel(1, 0);
    const Vector& r0 = model.reward(0, 0);
    const Vector& r1 = model.reward(1, 0);

    Vector values(replications, 0.0);
    for (int rep = 0; rep < replications; ++rep) {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(rep));
        auto policy = rule.clone();
        policy->reset();
        std::vector<long> counts = init.counts;
        double total = 0.0;
        for (int t = 0; t < burn_in + horizon; ++t) {
            Vector m(model.d);
            for (int s = 0; s < model.d; ++s)
                m[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
            OccupationVector y = policy->decide(0, m);
            RoundingOutcome round = randomized_round(y.y1, {counts, n}, rng);
            if (t >= burn_in) total += epoch_reward(counts, round.activations, r0, r1);
            counts = step_counts(counts, round.activations, k0, k1, rng);
        }
        values[rep] = total / (static_cast<double>(n) * static_cast<double>(horizon));
    }
    return estimate_from(values);
}

MeanFieldTrajectory mean_field(const RBModel& model, const DecisionRule& rule) {
    if (!model.horizon.is_finite())
        throw std::invalid_argument("mean_field: finite-horizon models only");
    const int T = model.horizon.T;
    MeanFieldTrajectory traj;
    auto policy = rule.clone();
    policy->reset();
    Vector m = model.m0;
    for (int t = 0; t < T; ++t) {
        OccupationVector y = policy->decide(t, m);
        const Vector& r0 = model.reward(0, t);
        const Vector& r1 = model.reward(1, t);
        for (int s = 0; s < model.d; ++s) traj.value += y.y0[s] * r0[s] + y.y1[s] * r1[s];
        traj.m.push_back(m);
        if (t + 1 < T) m = phi(model, t, y);
        traj.y.push_back(std::move(y));
    }
    return traj;
}

ErrorStats lemma1_statistics(const RBModel& model, const DecisionRule& rule, long n, long samples,
                             std::uint64_t seed, std::vector<double> eps) {
    if (n < 1) throw std::invalid_argument("lemma1_statistics: n must be positive");
    const int d = model.d;
    auto rng = make_rng(seed);
    auto policy = rule.clone();
    policy->reset();

    // fix one integer occupation Y^(N) from m(0) via the rule plus one rounding
    const ArmPopulationState init = apportion(model.m0, n);
    Vector m = init.measure();
    OccupationVector y = policy->decide(0, m);
    RoundingOutcome round = randomized_round(y.y1, init, rng);
    OccupationVector y_n(d);
    for (int s = 0; s < d; ++s) {
        y_n.y1[s] = static_cast<double>(round.activations[s]) / static_cast<double>(n);
        y_n.y0[s] = static_cast<double>(init.counts[s] - round.activations[s]) /
                    static_cast<double>(n);
    }
    const Vector target = phi(model, 0, y_n);
    const Matrix& k0 = model.kernel(0, 0);
    const Matrix& k1 = model.kernel(1, 0);

    ErrorStats stats;
    stats.n = n;
    stats.samples = samples;
    stats.eps = std::move(eps);
    stats.tail_freq.assign(stats.eps.size(), 0.0);
    stats.tail_bound.resize(stats.eps.size());
    for (std::size_t k = 0; k < stats.eps.size(); ++k)
        stats.tail_bound[k] = 2.0 * d *
                              std::exp(-2.0 * static_cast<double>(n) * stats.eps[k] *
                                       stats.eps[k] / (static_cast<double>(d) * d));
    stats.l1_bound = std::sqrt(static_cast<double>(d) / static_cast<double>(n));

    Vector sum_e(d, 0.0), sum_e2(d, 0.0);
    double sum_l1 = 0.0;
    for (long k = 0; k < samples; ++k) {
        std::vector<long> next = step_counts(init.counts, round.activations, k0, k1, rng);
        double l1 = 0.0;
        for (int s = 0; s < d; ++s) {
            double e = static_cast<double>(next[s]) / static_cast<double>(n) - target[s];
            sum_e[s] += e;
            sum_e2[s] += e * e;
            l1 += std::abs(e);
        }
        sum_l1 += l1;
        for (std::size_t i = 0; i < stats.eps.size(); ++i)
            if (l1 >= stats.eps[i]) stats.tail_freq[i] += 1.0;
    }
    stats.coord_mean.resize(d);
    stats.coord_sigma.resize(d);
    const double ns = static_cast<double>(samples);
    for (int s = 0; s < d; ++s) {
        stats.coord_mean[s] = sum_e[s] / ns;
        double var = std::max(sum_e2[s] / ns - stats.coord_mean[s] * stats.coord_mean[s], 0.0);
        stats.coord_sigma[s] = std::sqrt(var / ns);
    }
    stats.mean_l1 = sum_l1 / ns;
    for (double& f : stats.tail_freq) f /= ns;
    return stats;
}

UGAPReport ugap_check(const RBModel& model, const DecisionRule& rule, int grid_size, int t_max,
                      double epsilon, std::uint64_t seed) {
    InfiniteLPSolution sol = solve_infinite(model);
    const int d = model.d;
    std::vector<Vector> starts;
    for (int s = 0; s < d; ++s) {
        Vector corner(d, 0.0);
        corner[s] = 1.0;
        starts.push_back(std::move(corner));
    }
    auto rng = make_rng(seed);
    for (int k = 0; k < grid_size; ++k) starts.push_back(uniform_simplex_point(rng, d));
    starts.push_back(sol.m_star);

    UGAPReport report;
    report.epsilon = epsilon;
    report.t_max = t_max;
    report.consistent = true;
    auto policy = rule.clone();
    policy->reset();
    for (const Vector& start : starts) {
        Vector m = start;
        int last_outside = 0;  // t index of the last iterate outside the ball
        if (l1_distance(m, sol.m_star) > epsilon) last_outside = 0;
        double final_distance = l1_distance(m, sol.m_star);
        for (int t = 1; t <= t_max; ++t) {
            m = phi(model, 0, policy->decide(0, m));
            final_distance = l1_distance(m, sol.m_star);
            if (final_distance > epsilon) last_outside = t;
        }
        report.max_final_distance = std::max(report.max_final_distance, final_distance);
        if (last_outside >= t_max) {
            report.consistent = false;
            if (!report.has_witness) {
                report.has_witness = true;
                report.witness_start = start;
            }
        } else {
            report.empirical_t_eps = std::max(report.empirical_t_eps, last_outside + 1);
        }
    }
    return report;
}

namespace {

// Enumerates compositions of `total` into `parts` slots, calling fn on each.
template <typename Fn>
void for_each_composition(long total, int parts, std::vector<long>& buf, int at, Fn&& fn) {
    if (at == parts - 1) {
        buf[at] = total;
        fn(buf);
        return;
    }
    for (long k = 0; k <= total; ++k) {
        buf[at] = k;
        for_each_composition(total - k, parts, buf, at + 1, fn);
    }
}

double binomial_coefficient(long n, long k) {
    double r = 1.0;
    for (long i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Distribution of multinomial(count, row) added on top of each entry of base.
using CountDist = std::map<std::vector<long>, double>;

void convolve_group(CountDist& dist, long count, std::span<const double> row,
                    std::size_t* cells) {
    if (count == 0) return;
    const int d = static_cast<int>(row.size());
    CountDist next;
    std::vector<long> buf(d, 0);
    for_each_composition(count, d, buf, 0, [&](const std::vector<long>& split) {
        // exact multinomial pmf via sequential binomials
        double p = 1.0;
        long left = count;
        double p_left = 1.0;
        for (int i = 0; i < d; ++i) {
            if (split[i] == 0) continue;
            if (row[i] <= 0.0) {
                p = 0.0;
                break;
            }
            double q = std::min(row[i] / std::max(p_left, 1e-300), 1.0);
            p *= binomial_coefficient(left, split[i]) * std::pow(q, split[i]) *
                 std::pow(1.0 - q, left - split[i]);
            left -= split[i];
            p_left -= row[i];
        }
        if (p <= 0.0) return;
        for (const auto& [vec, prob] : dist) {
            std::vector<long> merged = vec;
            for (int i = 0; i < d; ++i) merged[i] += split[i];
            next[std::move(merged)] += prob * p;
            ++*cells;
        }
    });
    dist = std::move(next);
}

}  // namespace

double exact_oracle(const RBModel& model, long n, std::size_t cell_cap) {
    if (!model.horizon.is_finite())
        throw std::invalid_argument("exact_oracle: finite-horizon models only");
    const int d = model.d;
    const int T = model.horizon.T;
    double budget_exact = model.alpha * static_cast<double>(n);
    long budget = static_cast<long>(std::llround(budget_exact));
    if (std::abs(budget_exact - static_cast<double>(budget)) > 1e-9)
        throw std::invalid_argument("exact_oracle: alpha*n must be an integer");
    ArmPopulationState init = apportion(model.m0, n);
    for (int s = 0; s < d; ++s) {
        if (std::abs(model.m0[s] * static_cast<double>(n) -
                     static_cast<double>(init.counts[s])) > 1e-9)
            throw std::invalid_argument("exact_oracle: n*m0 must be integral");
    }

    std::size_t cells = 0;
    std::map<std::vector<long>, double> value;  // V at epoch t+1, built backwards
    for (int t = T - 1; t >= 0; --t) {
        std::map<std::vector<long>, double> prev;
        const Vector& r0 = model.reward(0, t);
        const Vector& r1 = model.reward(1, t);
        const Matrix& k0 = model.kernel(0, t);
        const Matrix& k1 = model.kernel(1, t);
        std::vector<long> state_buf(d, 0);
        for_each_composition(n, d, state_buf, 0, [&](const std::vector<long>& counts) {
            double best = -std::numeric_limits<double>::infinity();
            std::vector<long> act_buf(d, 0);
            // all activation splits within counts summing to the budget
            std::function<void(int, long)> rec = [&](int at, long left) {
                if (at == d) {
                    if (left != 0) return;
                    double immediate = 0.0;
                    for (int s = 0; s < d; ++s)
                        immediate += static_cast<double>(act_buf[s]) * r1[s] +
                                     static_cast<double>(counts[s] - act_buf[s]) * r0[s];
                    double cont = 0.0;
                    if (t + 1 < T) {
                        CountDist dist;
                        dist[std::vector<long>(d, 0)] = 1.0;
                        for (int s = 0; s < d; ++s) {
                            convolve_group(dist, act_buf[s], k1.row(s), &cells);
                            convolve_group(dist, counts[s] - act_buf[s], k0.row(s), &cells);
                            if (cells > cell_cap)
                                throw std::runtime_error("exact_oracle: cell cap exceeded");
                        }
                        for (const auto& [next_counts, prob] : dist)
                            cont += prob * value.at(next_counts);
                    }
                    best = std::max(best, immediate + cont);
                    return;
                }
                long hi = std::min<long>(counts[at], left);
                for (long a = 0; a <= hi; ++a) {
                    act_buf[at] = a;
                    rec(at + 1, left - a);
                }
            };
            rec(0, budget);
            if (best == -std::numeric_limits<double>::infinity())
                throw std::runtime_error("exact_oracle: no feasible activation split");
            prev[counts] = best;
            if (++cells > cell_cap) throw std::runtime_error("exact_oracle: cell cap exceeded");
        });
        value = std::move(prev);
    }
    return value.at(init.counts) / static_cast<double>(n);
}

}  // namespace rb
