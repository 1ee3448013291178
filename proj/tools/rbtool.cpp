// Command-line front end: model generation, relaxation solves, index tables,
// simulation, the exact oracle, diagnostics, and the three experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rb/experiments.hpp"
#include "rb/indices.hpp"
#include "rb/model.hpp"
#include "rb/policies.hpp"
#include "rb/relaxation.hpp"
#include "rb/simulate.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

json occupation_to_json(const rb::OccupationVector& y) {
    return json{{"y0", y.y0}, {"y1", y.y1}};
}

json partition_to_json(const rb::Partition& p) {
    return json{{"s_plus", p.s_plus}, {"s_zero", p.s_zero}, {"s_minus", p.s_minus},
                {"s_empty", p.s_empty}};
}

json classification_to_json(const rb::Classification& c) {
    return json{{"szero_sizes", c.szero_sizes},
                {"rankable_witness", c.rankable_witness},
                {"non_degenerate_witness", c.non_degenerate_witness},
                {"degenerate_witness", c.degenerate_witness}};
}

// policy spec: wf | lp-index | lp-update | priority:<comma order> | random-tie:<seed>
std::unique_ptr<rb::DecisionRule> make_policy(const std::string& spec, const rb::RBModel& model,
                                              int update_period) {
    if (spec.rfind("priority:", 0) == 0) {
        std::vector<int> sigma;
        std::stringstream ss(spec.substr(9));
        std::string tok;
        while (std::getline(ss, tok, ',')) sigma.push_back(std::stoi(tok));
        if (static_cast<int>(sigma.size()) != model.d)
            throw std::runtime_error("priority order must list every state exactly once");
        return rb::priority_policy(sigma, model.alpha);
    }
    if (model.horizon.is_finite()) {
        if (spec == "lp-update") return rb::lp_update_policy(model, update_period);
        rb::FiniteLPSolution sol = rb::solve_finite(model);
        rb::IndexTable idx = rb::finite_lp_indices(model, sol);
        if (spec == "wf") {
            rb::Vector scores(model.d);
            for (int s = 0; s < model.d; ++s) scores[s] = -s;  // state-id tie-break
            return rb::water_filling_policy(sol, model.alpha, scores, &idx);
        }
        if (spec == "lp-index") return rb::lp_index_policy(model, sol, idx);
        if (spec.rfind("random-tie:", 0) == 0) {
            auto rng = rb::make_rng(std::stoull(spec.substr(11)));
            rb::Vector scores(model.d);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (double& x : scores) x = unif(rng);
            return rb::water_filling_policy(sol, model.alpha, scores, &idx);
        }
    } else {
        if (spec == "lp-index" || spec == "wf" || spec == "lp-priority") {
            rb::InfiniteLPSolution sol = rb::solve_infinite(model);
            rb::IndexTable idx = rb::infinite_lp_indices(model, sol);
            return rb::lp_priority_policy_infinite(model, sol, idx);
        }
    }
    throw std::runtime_error("unknown policy spec: " + spec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"restless-bandit LP toolkit"};
    app.require_subcommand(1);

    // ---- make-model ----------------------------------------------------
    auto* make = app.add_subcommand("make-model", "generate a model JSON file");
    make->require_subcommand(1);
    std::string out_path;

    auto* mk_random = make->add_subcommand("random", "random instance");
    int mr_d = 10, mr_T = 20;
    std::uint64_t mr_seed = 1;
    double mr_alpha = 0.5;
    bool mr_infinite = false;
    mk_random->add_option("--d", mr_d, "number of states");
    mk_random->add_option("--horizon", mr_T, "horizon");
    mk_random->add_option("--seed", mr_seed, "seed");
    mk_random->add_option("--alpha", mr_alpha, "budget fraction");
    mk_random->add_flag("--infinite", mr_infinite, "mark the model infinite-horizon");
    mk_random->add_option("--out", out_path, "output file (default stdout)");

    auto* mk_degen = make->add_subcommand("degenerate", "two-state degenerate instance");
    double dg_p1 = 0.1, dg_p2 = 0.8, dg_q1 = 0.9, dg_q2 = 0.1;
    mk_degen->add_option("--p1", dg_p1);
    mk_degen->add_option("--p2", dg_p2);
    mk_degen->add_option("--q1", dg_q1);
    mk_degen->add_option("--q2", dg_q2);
    mk_degen->add_option("--out", out_path, "output file (default stdout)");

    auto* mk_screen = make->add_subcommand("screening", "applicant-screening instance");
    int sc_T = 5;
    mk_screen->add_option("--horizon", sc_T, "horizon");
    mk_screen->add_option("--out", out_path, "output file (default stdout)");

    // ---- solve-lp -------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve-lp", "solve the LP relaxation");
    std::string model_path;
    bool want_min = false, want_infinite = false;
    solve_cmd->add_option("--model", model_path, "model JSON file")->required();
    solve_cmd->add_flag("--min", want_min, "minimize instead of maximize");
    solve_cmd->add_flag("--infinite", want_infinite, "solve the stationary LP");
    solve_cmd->add_option("--out", out_path, "output file (default stdout)");

    // ---- indices ----------------------------------------------------------
    auto* idx_cmd = app.add_subcommand("indices", "LP (and Whittle) index table as CSV");
    bool want_whittle = false;
    idx_cmd->add_option("--model", model_path, "model JSON file")->required();
    idx_cmd->add_flag("--whittle", want_whittle, "include Whittle indices (infinite horizon)");
    idx_cmd->add_option("--out", out_path, "output file (default stdout)");

    // ---- simulate ---------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "stochastic N-arm simulation");
    std::string policy_spec = "lp-index";
    long sim_n = 100;
    int sim_reps = 1000, update_period = 1, burn_in = 1000, inf_horizon = 5000;
    std::uint64_t sim_seed = 1;
    sim_cmd->add_option("--model", model_path, "model JSON file")->required();
    sim_cmd->add_option("--policy", policy_spec,
                        "wf|lp-index|lp-update|priority:<order>|random-tie:<seed>");
    sim_cmd->add_option("--n", sim_n, "arm population");
    sim_cmd->add_option("--replications", sim_reps, "replications");
    sim_cmd->add_option("--seed", sim_seed, "seed");
    sim_cmd->add_option("--update-period", update_period, "epochs between LP updates");
    sim_cmd->add_option("--burn-in", burn_in, "discarded epochs (infinite horizon)");
    sim_cmd->add_option("--horizon", inf_horizon, "averaged epochs (infinite horizon)");
    sim_cmd->add_option("--out", out_path, "output file (default stdout)");

    // ---- oracle -------------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum for a tiny instance");
    long oracle_n = 4;
    oracle_cmd->add_option("--model", model_path, "model JSON file")->required();
    oracle_cmd->add_option("--n", oracle_n, "arm population");

    // ---- ugap-check --------------------------------------------------------
    auto* ugap_cmd = app.add_subcommand("ugap-check", "uniform global attractor check");
    int ugap_grid = 32, ugap_tmax = 10000;
    double ugap_eps = 1e-6;
    std::uint64_t ugap_seed = 1;
    ugap_cmd->add_option("--model", model_path, "model JSON file")->required();
    ugap_cmd->add_option("--grid", ugap_grid, "random starting measures");
    ugap_cmd->add_option("--t-max", ugap_tmax, "iteration budget");
    ugap_cmd->add_option("--epsilon", ugap_eps, "attraction radius");
    ugap_cmd->add_option("--seed", ugap_seed, "seed");

    // ---- lemma1 -------------------------------------------------------------
    auto* lem_cmd = app.add_subcommand("lemma1", "one-step mean-field error statistics");
    long lem_n = 100, lem_samples = 100000;
    std::uint64_t lem_seed = 1;
    lem_cmd->add_option("--model", model_path, "model JSON file")->required();
    lem_cmd->add_option("--n", lem_n, "arm population");
    lem_cmd->add_option("--samples", lem_samples, "one-step samples");
    lem_cmd->add_option("--seed", lem_seed, "seed");

    // ---- experiment -----------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("experiment", "run a study and write CSV outputs");
    std::string exp_kind, exp_out = "out";
    std::uint64_t exp_seed = 1;
    int exp_reps = 0;
    bool exp_full = false, exp_svg = false, exp_wrong_prior = false;
    exp_cmd->add_option("kind", exp_kind, "tie-solving|screening|degenerate-rate")->required();
    exp_cmd->add_option("--seed", exp_seed, "seed");
    exp_cmd->add_option("--out", exp_out, "output directory");
    exp_cmd->add_option("--replications", exp_reps, "override replication count");
    exp_cmd->add_flag("--full", exp_full, "full-scale configuration");
    exp_cmd->add_flag("--svg", exp_svg, "emit plot.svg");
    exp_cmd->add_flag("--wrong-prior", exp_wrong_prior, "screening: hidden beta(3,1) qualities");

    CLI11_PARSE(app, argc, argv);

    try {
        if (make->parsed()) {
            rb::RBModel model;
            if (mk_random->parsed()) {
                model = rb::random_model(mr_d, mr_T, mr_seed, mr_alpha);
                if (mr_infinite) model.horizon = rb::Horizon::forever();
            } else if (mk_degen->parsed()) {
                auto ex = rb::degenerate_example(dg_p1, dg_p2, dg_q1, dg_q2);
                std::cerr << "degeneracy condition q1+p2 > 1+p1+q2: "
                          << (ex.condition_holds ? "holds" : "does not hold") << "\n";
                model = std::move(ex.model);
            } else {
                model = rb::screening_model(sc_T);
            }
            emit(rb::model_to_json(model) + "\n", out_path);
        } else if (solve_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            json out;
            if (want_infinite || !model.horizon.is_finite()) {
                if (model.horizon.is_finite()) {
                    if (!model.stationary())
                        throw std::runtime_error(
                            "--infinite needs a single kernel/reward pair");
                    model.horizon = rb::Horizon::forever();
                }
                rb::InfiniteLPSolution sol = rb::solve_infinite(model);
                out["value"] = sol.value;
                out["gamma"] = sol.gamma_star;
                out["y_star"] = occupation_to_json(sol.y_star);
                out["m_star"] = sol.m_star;
                out["partition"] = partition_to_json(sol.partition);
                out["classification"] = classification_to_json(rb::classify(sol));
            } else {
                rb::FiniteLPSolution sol =
                    want_min ? rb::solve_finite_min(model) : rb::solve_finite(model);
                out["value"] = sol.value;
                out["gamma"] = sol.gamma;
                out["y_star"] = json::array();
                out["m_star"] = json::array();
                out["partition"] = json::array();
                for (int t = 0; t < sol.T; ++t) {
                    out["y_star"].push_back(occupation_to_json(sol.y_star[t]));
                    out["m_star"].push_back(sol.m_star[t]);
                    out["partition"].push_back(partition_to_json(sol.partition[t]));
                }
                out["classification"] = classification_to_json(rb::classify(sol));
            }
            emit(out.dump(2) + "\n", out_path);
        } else if (idx_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            std::ostringstream csv;
            csv << "state,epoch,lp_index,whittle_index,partition_set\n";
            csv.precision(12);
            if (model.horizon.is_finite()) {
                rb::FiniteLPSolution sol = rb::solve_finite(model);
                rb::IndexTable idx = rb::finite_lp_indices(model, sol);
                for (int t = 0; t < sol.T; ++t)
                    for (int s = 0; s < model.d; ++s)
                        csv << s << "," << t << "," << idx.index(s, t) << ",,"
                            << sol.partition[t].set_name(s) << "\n";
            } else {
                rb::InfiniteLPSolution sol = rb::solve_infinite(model);
                rb::IndexTable idx = rb::infinite_lp_indices(model, sol);
                rb::IndexTable whittle;
                if (want_whittle) whittle = rb::whittle_indices(model);
                for (int s = 0; s < model.d; ++s) {
                    csv << s << ",inf," << idx.lp_index[s] << ",";
                    if (want_whittle) csv << whittle.whittle[s];
                    csv << "," << sol.partition.set_name(s) << "\n";
                }
                if (want_whittle)
                    std::cerr << "indexable: " << (whittle.indexable ? "yes" : "no") << "\n";
            }
            emit(csv.str(), out_path);
        } else if (sim_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            auto policy = make_policy(policy_spec, model, update_period);
            std::ostringstream csv;
            csv << "n,policy,mean,ci_half_width,v_rel,score\n";
            csv.precision(12);
            if (model.horizon.is_finite()) {
                rb::SimulationResult sim =
                    rb::simulate_policy(model, *policy, sim_n, sim_reps, sim_seed);
                double v_rel = rb::solve_finite(model).value;
                double v_min = rb::solve_finite_min(model).value;
                csv << sim_n << "," << policy->name() << "," << sim.value.mean << ","
                    << sim.value.half_width << "," << v_rel << ",";
                if (v_rel - v_min > 1e-12)
                    csv << rb::score(sim.value.mean, v_rel, v_min);
                csv << "\n";
            } else {
                rb::ValueEstimate est = rb::simulate_policy_infinite(
                    model, *policy, sim_n, burn_in, inf_horizon, sim_reps, sim_seed);
                double v_rel = rb::solve_infinite(model).value;
                csv << sim_n << "," << policy->name() << "," << est.mean << "," << est.half_width
                    << "," << v_rel << ",\n";
            }
            emit(csv.str(), out_path);
        } else if (oracle_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            double v = rb::exact_oracle(model, oracle_n);
            std::printf("%.12f\n", v);
        } else if (ugap_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            rb::InfiniteLPSolution sol = rb::solve_infinite(model);
            rb::IndexTable idx = rb::infinite_lp_indices(model, sol);
            auto rule = rb::lp_priority_policy_infinite(model, sol, idx);
            rb::UGAPReport rep =
                rb::ugap_check(model, *rule, ugap_grid, ugap_tmax, ugap_eps, ugap_seed);
            if (rep.consistent) {
                std::printf("UGAP-consistent: every start inside B(m*, %g) by t=%d (T(eps)=%d)\n",
                            rep.epsilon, rep.t_max, rep.empirical_t_eps);
            } else {
                std::printf("violation found: a start is outside B(m*, %g) at t=%d\n",
                            rep.epsilon, rep.t_max);
            }
        } else if (lem_cmd->parsed()) {
            rb::RBModel model = rb::load_model(model_path);
            std::unique_ptr<rb::DecisionRule> rule;
            if (model.horizon.is_finite()) {
                rule = make_policy("lp-index", model, 1);
            } else {
                rule = make_policy("lp-priority", model, 1);
            }
            rb::ErrorStats stats = rb::lemma1_statistics(model, *rule, lem_n, lem_samples, lem_seed);
            std::printf("n=%ld samples=%ld\n", stats.n, stats.samples);
            for (int s = 0; s < static_cast<int>(stats.coord_mean.size()); ++s)
                std::printf("coord %d: mean %.3e (sigma %.3e)\n", s, stats.coord_mean[s],
                            stats.coord_sigma[s]);
            std::printf("mean |E|_1 = %.6f (bound sqrt(d/n) = %.6f)\n", stats.mean_l1,
                        stats.l1_bound);
            for (std::size_t k = 0; k < stats.eps.size(); ++k)
                std::printf("P(|E|_1 >= %.3f) = %.5f (bound %.5f)\n", stats.eps[k],
                            stats.tail_freq[k], stats.tail_bound[k]);
        } else if (exp_cmd->parsed()) {
            if (exp_kind == "tie-solving") {
                rb::TieSolvingConfig config;
                config.seed = exp_seed;
                if (exp_reps > 0) config.replications = exp_reps;
                if (exp_full) {
                    config.random_orders = 100;
                    config.n_grid = {10, 15, 20, 25, 30, 35, 40, 45, 50};
                }
                auto result = rb::tie_solving_experiment(config);
                rb::write_tie_solving_outputs(result, config, exp_out, exp_svg);
            } else if (exp_kind == "screening") {
                rb::ScreeningConfig config;
                config.seed = exp_seed;
                config.wrong_prior = exp_wrong_prior;
                if (exp_reps > 0) config.replications = exp_reps;
                if (exp_full) config.n_grid = {10, 20, 40, 80, 160, 320};
                auto result = rb::screening_experiment(config);
                rb::write_screening_outputs(result, config, exp_out, exp_svg);
            } else if (exp_kind == "degenerate-rate") {
                rb::DegenerateRateConfig config;
                config.seed = exp_seed;
                if (exp_reps > 0) config.replications = exp_reps;
                auto result = rb::degenerate_rate_experiment(config);
                rb::write_degenerate_rate_outputs(result, config, exp_out, exp_svg);
            } else {
                throw std::runtime_error("unknown experiment: " + exp_kind);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
