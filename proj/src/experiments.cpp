#include "rb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "rb/indices.hpp"
#include "rb/relaxation.hpp"

namespace rb {

double score(double v, double v_rel, double v_rel_min) {
    double denom = v_rel - v_rel_min;
    if (!(denom > 1e-12))
        throw std::domain_error("score: v_rel equals v_rel_min, score undefined");
    return (v - v_rel_min) / denom;
}

namespace {

struct TieCell {
    int model_id;
    int policy;  // -1 = lp-index, k >= 0 = random order k
    long n;
};

}  // namespace

TieSolvingResult tie_solving_experiment(const TieSolvingConfig& config) {
    struct ModelBundle {
        RBModel model;
        FiniteLPSolution sol;
        double v_rel = 0.0, v_rel_min = 0.0;
        std::vector<std::unique_ptr<DecisionRule>> policies;  // [0]=lp-index, then random
    };
    std::vector<ModelBundle> bundles(config.models);

    for (int i = 0; i < config.models; ++i) {
        ModelBundle& b = bundles[i];
        // skip the rare draw whose relaxation bounds coincide (unscorable)
        for (std::uint64_t salt = 0;; ++salt) {
            std::uint64_t model_seed = splitmix_hash(config.seed, 1000003ULL * i + salt);
            b.model = random_model(config.d, config.horizon, model_seed);
            b.sol = solve_finite(b.model);
            b.v_rel = b.sol.value;
            b.v_rel_min = solve_finite_min(b.model).value;
            if (b.v_rel - b.v_rel_min > 1e-9) break;
        }
        IndexTable idx = finite_lp_indices(b.model, b.sol);
        b.policies.push_back(lp_index_policy(b.model, b.sol, idx));
        auto rng = make_rng(config.seed, 7700000ULL + static_cast<std::uint64_t>(i));
        for (int k = 0; k < config.random_orders; ++k) {
            // a random fixed priority score vector, drawn once per simulation batch
            Vector scores(config.d);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (double& x : scores) x = unif(rng);
            b.policies.push_back(water_filling_policy(b.sol, b.model.alpha, scores, &idx));
        }
    }

    std::vector<TieCell> cells;
    for (int i = 0; i < config.models; ++i)
        for (int p = -1; p < config.random_orders; ++p)
            for (long n : config.n_grid) cells.push_back({i, p, n});

    TieSolvingResult result;
    result.records.resize(cells.size());
    parallel_for(
        static_cast<long>(cells.size()),
        [&](long c) {
            const TieCell& cell = cells[static_cast<std::size_t>(c)];
            const ModelBundle& b = bundles[cell.model_id];
            const DecisionRule& rule = *b.policies[static_cast<std::size_t>(cell.policy + 1)];
            std::uint64_t sim_seed =
                splitmix_hash(config.seed, 31ULL * (cell.model_id + 1) + 100000ULL * (cell.policy + 2) +
                                               1000000007ULL * static_cast<std::uint64_t>(cell.n));
            SimulationResult sim =
                simulate_policy(b.model, rule, cell.n, config.replications, sim_seed);
            ScoreRecord rec;
            rec.model_id = cell.model_id;
            rec.policy_id = cell.policy < 0 ? "lp-index" : "random-" + std::to_string(cell.policy);
            rec.n = cell.n;
            rec.score = score(sim.value.mean, b.v_rel, b.v_rel_min);
            rec.ci = sim.value.half_width / (b.v_rel - b.v_rel_min);
            result.records[static_cast<std::size_t>(c)] = std::move(rec);
        },
        config.threads);

    // per-n summary with the paired per-model difference lp-index minus random mean
    for (long n : config.n_grid) {
        TieSolvingResult::Summary summary;
        summary.n = n;
        Vector diffs(config.models, 0.0);
        double lp_total = 0.0, rnd_total = 0.0;
        for (int i = 0; i < config.models; ++i) {
            double lp_score = 0.0, rnd_score = 0.0;
            for (const auto& rec : result.records) {
                if (rec.model_id != i || rec.n != n) continue;
                if (rec.policy_id == "lp-index")
                    lp_score = rec.score;
                else
                    rnd_score += rec.score / config.random_orders;
            }
            diffs[i] = lp_score - rnd_score;
            lp_total += lp_score;
            rnd_total += rnd_score;
            if (lp_score >= rnd_score) ++summary.models_lp_wins;
        }
        summary.lp_index_mean = lp_total / config.models;
        summary.random_mean = rnd_total / config.models;
        MeanCi diff_ci = mean_ci(diffs);
        summary.diff_mean = diff_ci.mean;
        summary.diff_ci = diff_ci.half_width;
        result.summaries.push_back(summary);
    }
    return result;
}

namespace {

// Hidden applicant quality: uniform prior, or Beta(3,1) (density 3 p^2) when wrong.
double draw_quality(std::mt19937_64& rng, bool wrong_prior) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    return wrong_prior ? std::cbrt(u) : u;
}

}  // namespace

ValueEstimate simulate_screening(const RBModel& model, const DecisionRule& rule, long n,
                                 int replications, std::uint64_t seed, bool wrong_prior) {
    const int T = model.horizon.T;
    const int d = model.d;
    auto states = screening_states(T);
    // (a,b) -> (a+1,b) / (a,b+1) successor indices; -1 on cap states
    std::vector<int> up(d, -1), down(d, -1);
    for (int i = 0; i < d; ++i) {
        auto [a, b] = states[i];
        if (a + b <= T) {
            up[i] = screening_state_index(T, a + 1, b);
            down[i] = screening_state_index(T, a, b + 1);
        }
    }

    Vector values(replications, 0.0);
    for (int rep = 0; rep < replications; ++rep) {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(rep));
        auto policy = rule.clone();
        policy->reset();
        std::vector<double> quality(n);
        std::vector<int> arm_state(n, 0);  // all applicants start at (1,1)
        for (long i = 0; i < n; ++i) quality[i] = draw_quality(rng, wrong_prior);

        double total = 0.0;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int t = 0; t < T; ++t) {
            std::vector<long> counts(d, 0);
            for (long i = 0; i < n; ++i) ++counts[arm_state[i]];
            Vector m(d);
            for (int s = 0; s < d; ++s)
                m[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
            OccupationVector y = policy->decide(t, m);
            RoundingOutcome round = randomized_round(y.y1, {counts, n}, rng);
            // arms within a state share the same posterior; take them in index order
            std::vector<long> quota = round.activations;
            for (long i = 0; i < n; ++i) {
                int s = arm_state[i];
                if (quota[s] <= 0) continue;
                --quota[s];
                if (t == T - 1) {
                    total += quality[i];  // admission pays the true quality
                } else if (up[s] >= 0) {
                    bool signal = unif(rng) < quality[i];
                    arm_state[i] = signal ? up[s] : down[s];
                }
            }
        }
        values[rep] = total / static_cast<double>(n);
    }
    MeanCi ci = mean_ci(values);
    return {ci.mean, ci.half_width, static_cast<int>(ci.n)};
}

ScreeningResult screening_experiment(const ScreeningConfig& config) {
    RBModel model = screening_model(config.t);
    FiniteLPSolution sol = solve_finite(model);
    IndexTable idx = finite_lp_indices(model, sol);

    ScreeningResult result;
    result.v_rel = sol.value;

    struct Cell {
        const char* policy;
        long n;
    };
    std::vector<Cell> cells;
    for (long n : config.n_grid) {
        cells.push_back({"lp-index", n});
        cells.push_back({"lp-update", n});
    }
    result.records.resize(cells.size());
    auto lp_index = lp_index_policy(model, sol, idx);
    auto lp_update = lp_update_policy(model, config.update_period);
    parallel_for(
        static_cast<long>(cells.size()),
        [&](long c) {
            const Cell& cell = cells[static_cast<std::size_t>(c)];
            const DecisionRule& rule =
                std::string_view(cell.policy) == "lp-index" ? *lp_index : *lp_update;
            std::uint64_t sim_seed = splitmix_hash(
                config.seed, 13ULL * static_cast<std::uint64_t>(cell.n) +
                                 (std::string_view(cell.policy) == "lp-index" ? 1 : 2));
            ValueEstimate est = simulate_screening(model, rule, cell.n, config.replications,
                                                   sim_seed, config.wrong_prior);
            result.records[static_cast<std::size_t>(c)] =
                ScreeningRecord{cell.policy, cell.n, est.mean, est.half_width};
        },
        config.threads);
    return result;
}

DegenerateRateResult degenerate_rate_experiment(const DegenerateRateConfig& config) {
    DegenerateExample ex = degenerate_example(config.p1, config.p2, config.q1, config.q2);
    if (!ex.condition_holds)
        throw std::invalid_argument(
            "degenerate_rate_experiment: parameters do not satisfy q1 + p2 > 1 + p1 + q2");
    FiniteLPSolution sol = solve_finite(ex.model);
    IndexTable idx = finite_lp_indices(ex.model, sol);
    auto rule = lp_index_policy(ex.model, sol, idx);

    DegenerateRateResult result;
    result.v_rel = sol.value;
    result.records.resize(config.n_grid.size());
    parallel_for(
        static_cast<long>(config.n_grid.size()),
        [&](long i) {
            long n = config.n_grid[static_cast<std::size_t>(i)];
            std::uint64_t sim_seed = splitmix_hash(config.seed, static_cast<std::uint64_t>(n));
            SimulationResult sim =
                simulate_policy(ex.model, *rule, n, config.replications, sim_seed);
            GapRecord rec;
            rec.n = n;
            rec.gap = sol.value - sim.value.mean;
            rec.ci = sim.value.half_width;
            rec.sqrt_n_gap = std::sqrt(static_cast<double>(n)) * rec.gap;
            result.records[static_cast<std::size_t>(i)] = rec;
        },
        config.threads);

    result.stabilizes = true;
    for (std::size_t i = 0; i + 1 < result.records.size(); ++i) {
        double a = result.records[i].sqrt_n_gap;
        double b = result.records[i + 1].sqrt_n_gap;
        if (!(a > 0.0) || !(b > 0.0) || b / a < 0.5 || b / a > 2.0) result.stabilizes = false;
    }
    return result;
}

// ---------------------------------------------------------------------------
// output emission

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string provenance_header(const std::string& config_json) {
    return "# config_hash=" + hex_u64(fnv1a64(config_json)) + "\n";
}

// minimal multi-series line chart; enough to eyeball convergence trends
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::vector<std::string>& series_names,
                           const std::vector<std::vector<std::pair<double, double>>>& series) {
    const int w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 45;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1;
    double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<text x='" << w / 2 << "' y='" << h - 10 << "' text-anchor='middle' font-size='12'>"
        << x_label << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        double y = y_lo + (y_hi - y_lo) * k / 4.0;
        out << "<text x='" << ml - 6 << "' y='" << sy(y) + 4
            << "' text-anchor='end' font-size='10'>";
        out.precision(4);
        out << y << "</text>\n";
        double x = x_lo + (x_hi - x_lo) * k / 4.0;
        out << "<text x='" << sx(x) << "' y='" << h - mb + 14
            << "' text-anchor='middle' font-size='10'>" << x << "</text>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << "<polyline fill='none' stroke='" << colors[i % 6] << "' stroke-width='1.5' points='";
        for (auto [x, y] : series[i]) out << sx(x) << "," << sy(y) << " ";
        out << "'/>\n";
        out << "<text x='" << w - mr - 5 << "' y='" << mt + 15 * (i + 1)
            << "' text-anchor='end' font-size='11' fill='" << colors[i % 6] << "'>"
            << series_names[i] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

void write_tie_solving_outputs(const TieSolvingResult& result, const TieSolvingConfig& config,
                               const std::string& out_dir, bool svg) {
    fs::create_directories(out_dir);
    std::ostringstream cfg;
    cfg << "{\n  \"experiment\": \"tie-solving\",\n  \"models\": " << config.models
        << ",\n  \"d\": " << config.d << ",\n  \"horizon\": " << config.horizon
        << ",\n  \"random_orders\": " << config.random_orders
        << ",\n  \"replications\": " << config.replications << ",\n  \"seed\": " << config.seed
        << ",\n  \"n_grid\": [";
    for (std::size_t i = 0; i < config.n_grid.size(); ++i)
        cfg << (i ? ", " : "") << config.n_grid[i];
    cfg << "]\n}\n";
    write_file(fs::path(out_dir) / "config.json", cfg.str());

    std::ostringstream csv;
    csv << provenance_header(cfg.str());
    csv << "model_id,policy_id,n,score,ci\n";
    csv.precision(12);
    for (const auto& r : result.records)
        csv << r.model_id << "," << r.policy_id << "," << r.n << "," << r.score << "," << r.ci
            << "\n";
    write_file(fs::path(out_dir) / "results.csv", csv.str());

    if (svg) {
        std::vector<std::vector<std::pair<double, double>>> series(2);
        for (const auto& s : result.summaries) {
            series[0].push_back({static_cast<double>(s.n), s.lp_index_mean});
            series[1].push_back({static_cast<double>(s.n), s.random_mean});
        }
        write_file(fs::path(out_dir) / "plot.svg",
                   svg_line_chart("Mean score by tie-break rule", "N",
                                  {"lp-index", "random order"}, series));
    }
}

void write_screening_outputs(const ScreeningResult& result, const ScreeningConfig& config,
                             const std::string& out_dir, bool svg) {
    fs::create_directories(out_dir);
    std::ostringstream cfg;
    cfg << "{\n  \"experiment\": \"screening\",\n  \"t\": " << config.t
        << ",\n  \"prior\": \"" << (config.wrong_prior ? "beta(3,1)" : "correct")
        << "\",\n  \"replications\": " << config.replications
        << ",\n  \"update_period\": " << config.update_period << ",\n  \"seed\": " << config.seed
        << ",\n  \"n_grid\": [";
    for (std::size_t i = 0; i < config.n_grid.size(); ++i)
        cfg << (i ? ", " : "") << config.n_grid[i];
    cfg << "]\n}\n";
    write_file(fs::path(out_dir) / "config.json", cfg.str());

    std::ostringstream csv;
    csv << provenance_header(cfg.str());
    csv << "policy_id,n,mean,ci_half_width,v_rel\n";
    csv.precision(12);
    for (const auto& r : result.records)
        csv << r.policy_id << "," << r.n << "," << r.mean << "," << r.ci << "," << result.v_rel
            << "\n";
    write_file(fs::path(out_dir) / "results.csv", csv.str());

    if (svg) {
        std::vector<std::vector<std::pair<double, double>>> series(3);
        for (const auto& r : result.records) {
            int idx = r.policy_id == "lp-index" ? 0 : 1;
            series[idx].push_back({static_cast<double>(r.n), r.mean});
        }
        for (long n : config.n_grid)
            series[2].push_back({static_cast<double>(n), result.v_rel});
        write_file(fs::path(out_dir) / "plot.svg",
                   svg_line_chart("Applicant screening value", "N",
                                  {"lp-index", "lp-update", "relaxation bound"}, series));
    }
}

void write_degenerate_rate_outputs(const DegenerateRateResult& result,
                                   const DegenerateRateConfig& config,
                                   const std::string& out_dir, bool svg) {
    fs::create_directories(out_dir);
    std::ostringstream cfg;
    cfg << "{\n  \"experiment\": \"degenerate-rate\",\n  \"p1\": " << config.p1
        << ", \"p2\": " << config.p2 << ", \"q1\": " << config.q1 << ", \"q2\": " << config.q2
        << ",\n  \"replications\": " << config.replications << ",\n  \"seed\": " << config.seed
        << ",\n  \"n_grid\": [";
    for (std::size_t i = 0; i < config.n_grid.size(); ++i)
        cfg << (i ? ", " : "") << config.n_grid[i];
    cfg << "]\n}\n";
    write_file(fs::path(out_dir) / "config.json", cfg.str());

    std::ostringstream csv;
    csv << provenance_header(cfg.str());
    csv << "n,gap,ci_half_width,sqrt_n_gap,v_rel,stabilizes\n";
    csv.precision(12);
    for (const auto& r : result.records)
        csv << r.n << "," << r.gap << "," << r.ci << "," << r.sqrt_n_gap << "," << result.v_rel
            << "," << (result.stabilizes ? 1 : 0) << "\n";
    write_file(fs::path(out_dir) / "results.csv", csv.str());

    if (svg) {
        std::vector<std::vector<std::pair<double, double>>> series(1);
        for (const auto& r : result.records)
            series[0].push_back({static_cast<double>(r.n), r.sqrt_n_gap});
        write_file(fs::path(out_dir) / "plot.svg",
                   svg_line_chart("sqrt(N) * optimality gap", "N", {"sqrt(n)*gap"}, series));
    }
}

}  // namespace rb
