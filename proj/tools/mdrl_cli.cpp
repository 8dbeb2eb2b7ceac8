// Command-line front end: solve, train, eval-ccs, eval-osi, sigma-points,
// oracle, env export. All outputs are fixed-format CSV, reproducible
// bit-for-bit for a given seed and config.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mdrl/dp_solvers.hpp"
#include "mdrl/envs.hpp"
#include "mdrl/harness.hpp"
#include "mdrl/io.hpp"
#include "mdrl/mdp.hpp"
#include "mdrl/osi.hpp"
#include "mdrl/reference.hpp"
#include "mdrl/rl_loop.hpp"
#include "mdrl/unscented.hpp"
#include "mdrl/utility.hpp"

namespace {

using namespace mdrl;

void write_sigma_points_csv(const SigmaPointSet& set, const std::string& path) {
    std::vector<std::string> columns;
    for (int c = 0; c < set.dim; ++c) columns.push_back("x" + std::to_string(c));
    CsvWriter csv(path, columns);
    for (int i = 0; i < set.n; ++i) {
        std::vector<double> row;
        for (int c = 0; c < set.dim; ++c) row.push_back(set.at(i, c));
        csv.row({}, row);
    }
}

int cmd_sigma_points(int dim, int order, std::uint64_t seed, const std::string& out) {
    auto set = solve_sigma_points(dim, order, 1e-6, Rng(seed));
    write_sigma_points_csv(set, out);
    std::cout << "sigma-points: dim=" << dim << " order=" << order << " residual=" << fmt_fixed8(set.residual)
              << (set.converged ? " (converged)" : " (best effort)") << "\n";
    return 0;
}

int cmd_solve(const std::string& algo, const std::string& mdp_path, int grid_res, double alpha, std::uint64_t seed,
              const std::string& out_dir) {
    auto mdp = load_mdp(mdp_path);
    auto problems = validate_mdp(mdp);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "invalid mdp: " << p << "\n";
        return 1;
    }
    std::filesystem::create_directories(out_dir);
    PreferenceGrid grid = PreferenceGrid::simplex(mdp.n_domains(), grid_res);
    SolveOptions opts;
    opts.alpha = alpha;
    auto res = run_solver(algo, mdp, grid, opts);
    save_qtable_csv(res.q, out_dir + "/qtable.csv");
    save_policy_csv(res.policy, out_dir + "/policy.csv");
    std::ostringstream log;
    log << "algo " << algo << "\n"
        << "seed " << seed << "\n"
        << "grid_resolution " << grid_res << "\n"
        << "alpha " << fmt_exact(alpha) << "\n"
        << "converged " << (res.converged ? 1 : 0) << "\n"
        << "iterations " << res.iterations << "\n"
        << "final_delta " << fmt_exact(res.final_delta) << "\n";
    for (std::size_t i = 0; i < res.delta_log.size(); ++i)
        log << "sweep " << i << " delta " << fmt_exact(res.delta_log[i]) << "\n";
    write_file(out_dir + "/convergence.log", log.str());
    if (!res.chi.empty()) {
        CsvWriter chi(out_dir + "/chi.csv", {"row", "state", "cell"});
        const int S = mdp.n_states;
        for (std::size_t i = 0; i < res.chi.size(); ++i)
            chi.row({std::to_string(i / static_cast<std::size_t>(S)), std::to_string(i % static_cast<std::size_t>(S)),
                     std::to_string(res.chi[i])});
    }
    std::cout << "solve: " << algo << (res.converged ? " converged in " : " stopped after ") << res.iterations
              << " sweeps\n";
    return 0;
}

int cmd_train(const std::string& algo, const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    auto cfg = load_experiment_config(config_path);
    MultiDomainMDP mdp = build_env(cfg.env);
    TrainConfig tc;
    tc.algo = algo_from_string(algo);
    tc.total_steps = cfg.total_steps;
    tc.warmup = cfg.warmup;
    tc.batch = cfg.batch;
    tc.alpha = cfg.alpha;
    tc.grid_resolution = cfg.grid_resolution;
    tc.seed = seed;
    auto res = run_training(mdp, tc);
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    std::filesystem::create_directories(dir);
    write_metrics_csv(res.metrics, dir + "/metrics.csv");
    save_qtable_csv(res.q1, dir + "/qtable.csv");
    save_policy_csv(res.policy, dir + "/policy.csv");
    std::cout << "train: " << algo << " for " << cfg.total_steps << " steps, " << res.metrics.size()
              << " episodes\n";
    return 0;
}

int cmd_eval_ccs(const std::string& config_path, const std::string& out_dir) {
    auto cfg = load_experiment_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    run_experiment(cfg);
    std::cout << "eval-ccs: results in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_eval_osi(const std::string& mdp_path, const std::string& policy_path, const std::string& mode_name,
                 int episodes, int episode_len, long osi_train_steps, std::uint64_t seed, const std::string& out_dir) {
    auto mdp = load_mdp(mdp_path);
    auto policy = load_policy_csv(policy_path);
    PreferenceGrid grid = PreferenceGrid::simplex(mdp.n_domains(),
                                                  PreferenceGrid::default_resolution(mdp.n_domains()));
    if (policy.n_cells != grid.n_cells())
        throw std::runtime_error("eval-osi: policy cell count does not match the default grid");
    std::filesystem::create_directories(out_dir);
    Rng root(seed);

    // The ensemble mode needs a trained identifier; fit one on random-policy
    // transitions from the same environment.
    EnsembleOSI osi = [&]() {
        std::vector<double> lo(static_cast<std::size_t>(mdp.kappa_dim())), hi(lo.size());
        for (std::size_t c = 0; c < lo.size(); ++c) {
            lo[c] = std::numeric_limits<double>::infinity();
            hi[c] = -std::numeric_limits<double>::infinity();
            for (const auto& d : mdp.domains) {
                lo[c] = std::min(lo[c], d.kappa[c]);
                hi[c] = std::max(hi[c], d.kappa[c]);
            }
        }
        Rng init = root.split(11);
        return EnsembleOSI::make(mdp, lo, hi, 4, 32, init);
    }();
    DynamicsModel dyn = DynamicsModel::make(mdp);
    if (osi_train_steps > 0) {
        Rng collect = root.split(12);
        Rng update = root.split(13);
        std::vector<std::vector<double>> kappas;
        for (const auto& d : mdp.domains) kappas.push_back(d.kappa);
        std::vector<OsiSample> buffer;
        int s = collect.categorical(mdp.initial_dist);
        int dom = 0;
        for (long t = 0; t < osi_train_steps; ++t) {
            if (t % episode_len == 0) {
                s = collect.categorical(mdp.initial_dist);
                dom = collect.next_int(mdp.n_domains());
            }
            const int a = collect.next_int(mdp.n_actions);
            auto [s2, r] = sample_transition(mdp, dom, s, a, collect);
            (void)r;
            OsiSample sample;
            sample.s = s;
            sample.a = a;
            sample.s2 = s2;
            sample.kappa = dom;
            sample.prior = Posterior::uniform_over(mdp.n_domains());
            buffer.push_back(std::move(sample));
            s = s2;
            if (buffer.size() == 64) {
                ensemble_update(osi, dyn, buffer, 0.02, update);
                buffer.clear();
            }
        }
    }

    const OsiMode mode = osi_mode_from_string(mode_name);
    auto res = evaluate_with_osi(policy, grid, mdp, mode, episodes, episode_len, &osi, root.split(20));
    auto baseline = evaluate_with_osi(policy, grid, mdp, OsiMode::fixed_full, episodes, episode_len, &osi,
                                      root.split(20));

    CsvWriter returns(out_dir + "/episode_returns.csv", {"episode", "true_domain", "return"});
    for (std::size_t ep = 0; ep < res.returns.size(); ++ep)
        returns.row({std::to_string(ep), std::to_string(res.true_domain[ep])}, {res.returns[ep]});

    // Belief trace of one episode per domain.
    {
        std::vector<std::string> columns = {"step", "episode"};
        const bool discrete = mode != OsiMode::ensemble;
        if (discrete)
            for (int d = 0; d < mdp.n_domains(); ++d) columns.push_back("w" + std::to_string(d));
        else
            for (int c = 0; c < mdp.kappa_dim(); ++c) {
                columns.push_back("mu" + std::to_string(c));
                columns.push_back("sigma" + std::to_string(c));
            }
        CsvWriter trace(out_dir + "/belief_trace.csv", columns);
        for (int dom = 0; dom < mdp.n_domains(); ++dom) {
            Rng episode_rng = root.split(30).split(static_cast<std::uint64_t>(dom));
            Posterior belief = Posterior::uniform_over(mdp.n_domains());
            int s = episode_rng.categorical(mdp.initial_dist);
            std::vector<std::vector<double>> kappas;
            for (const auto& d : mdp.domains) kappas.push_back(d.kappa);
            for (int t = 0; t < episode_len; ++t) {
                std::vector<double> row;
                if (discrete)
                    row = belief.domain_weights(kappas);
                else {
                    auto [m, sd] = belief.kappa_moments(kappas);
                    for (std::size_t c = 0; c < m.size(); ++c) {
                        row.push_back(m[c]);
                        row.push_back(sd[c]);
                    }
                }
                trace.row({std::to_string(t), std::to_string(dom)}, row);
                const int cell = grid.nearest_cell(belief.domain_weights(kappas));
                std::vector<double> pi(static_cast<std::size_t>(policy.n_actions));
                for (int a = 0; a < policy.n_actions; ++a) pi[static_cast<std::size_t>(a)] = policy.at(cell, s, a);
                const int a = episode_rng.categorical(pi);
                auto [s2, r] = sample_transition(mdp, dom, s, a, episode_rng);
                (void)r;
                if (mode == OsiMode::exact_bayes)
                    belief = bayes_filter_step(belief, mdp, s, a, s2);
                else if (mode == OsiMode::ensemble)
                    belief = ensemble_predict(osi, s, a, s2, belief);
                s = s2;
            }
        }
    }

    // Tendency counts versus the fixed-full baseline, per true domain.
    {
        CsvWriter tendency(out_dir + "/tendency.csv", {"mode", "increase", "decrease", "unchanged"});
        int inc = 0, dec = 0, same = 0;
        for (int d = 0; d < mdp.n_domains(); ++d) {
            const double diff = res.per_domain_mean[static_cast<std::size_t>(d)] -
                                baseline.per_domain_mean[static_cast<std::size_t>(d)];
            if (diff > 0)
                ++inc;
            else if (diff < 0)
                ++dec;
            else
                ++same;
        }
        tendency.row({mode_name, std::to_string(inc), std::to_string(dec), std::to_string(same)});
    }
    std::cout << "eval-osi: mode=" << mode_name << " mean return " << fmt_fixed8(res.mean_return)
              << " (fixed-full " << fmt_fixed8(baseline.mean_return) << ")\n";
    return 0;
}

int cmd_oracle(const std::string& mdp_path, int grid_res, std::int64_t cap, const std::string& out_dir) {
    auto mdp = load_mdp(mdp_path);
    std::filesystem::create_directories(out_dir);
    auto policies = enumerate_policies_oracle(mdp, cap);
    PreferenceGrid grid = PreferenceGrid::simplex(mdp.n_domains(), grid_res);
    std::vector<ValueVector> values;
    values.reserve(policies.size());
    for (const auto& p : policies) values.push_back(p.value);
    {
        std::vector<std::string> columns = {"policy_id", "actions"};
        for (int d = 0; d < mdp.n_domains(); ++d) columns.push_back("value_" + std::to_string(d));
        CsvWriter all(out_dir + "/policies.csv", columns);
        for (std::size_t i = 0; i < policies.size(); ++i) {
            std::string actions;
            for (int a : policies[i].actions) actions += std::to_string(a);
            all.row({std::to_string(i), actions}, policies[i].value);
        }
    }
    export_coverage_csv(compute_pcs(values), grid, out_dir + "/pcs.csv");
    export_coverage_csv(compute_ccs(values, grid), grid, out_dir + "/ccs.csv");
    std::cout << "oracle: " << policies.size() << " policies enumerated\n";
    return 0;
}

int cmd_env_export(const std::string& name, const std::string& out) {
    auto spec = default_env_spec(name);
    save_mdp(build_env(spec), out);
    std::cout << "env export: " << name << " -> " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular multi-domain RL toolkit: coverage-set solvers, sigma points, system identification"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out;
    std::string config;
    app.add_option("--seed", seed, "root random seed");
    app.add_option("--out", out, "output file or directory");
    app.add_option("--config", config, "configuration file");

    auto* sp = app.add_subcommand("sigma-points", "solve an equal-weight sigma-point set");
    int dim = 2, order = 10;
    sp->add_option("--dim", dim, "parameter dimension")->required();
    sp->add_option("--order", order, "highest moment order to match");

    auto* solve = app.add_subcommand("solve", "run a tabular solver on an MDP file");
    std::string algo, mdp_path;
    int grid_res = 10;
    double alpha = 0.05;
    solve->add_option("--algo", algo, "dr|cmdrl|emdrl|umdrl1|umdrl2")->required();
    solve->add_option("--mdp", mdp_path, "pmomdp file")->required();
    solve->add_option("--grid", grid_res, "preference grid resolution");
    solve->add_option("--alpha", alpha, "entropy temperature");

    auto* train = app.add_subcommand("train", "run the sample-based training loop");
    std::string train_algo;
    train->add_option("--algo", train_algo, "drsac|sirsa|cmdsac|emdsac|umdsirsa|umdsac1|umdsac2")->required();

    auto* eval_ccs_cmd = app.add_subcommand("eval-ccs", "run the experiment harness and score preferences");

    auto* eval_osi_cmd = app.add_subcommand("eval-osi", "evaluate a policy with belief propagation");
    std::string policy_path, mode_name = "exact-bayes";
    int episodes = 100, episode_len = 50;
    long osi_train_steps = 20000;
    eval_osi_cmd->add_option("--mdp", mdp_path, "pmomdp file")->required();
    eval_osi_cmd->add_option("--policy", policy_path, "policy csv from solve/train")->required();
    eval_osi_cmd->add_option("--mode", mode_name, "fixed-full|exact-bayes|ensemble");
    eval_osi_cmd->add_option("--episodes", episodes, "evaluation episodes");
    eval_osi_cmd->add_option("--episode-len", episode_len, "steps per episode");
    eval_osi_cmd->add_option("--train-osi", osi_train_steps, "identifier pre-training transitions");

    auto* oracle = app.add_subcommand("oracle", "enumerate deterministic policies and coverage sets");
    std::int64_t cap = 200000;
    oracle->add_option("--mdp", mdp_path, "pmomdp file")->required();
    oracle->add_option("--grid", grid_res, "preference grid resolution");
    oracle->add_option("--cap", cap, "policy enumeration cap");

    auto* env = app.add_subcommand("env", "environment utilities");
    auto* env_export = env->add_subcommand("export", "write a built-in environment to a pmomdp file");
    std::string env_name;
    env_export->add_option("--name", env_name, "two_domain_chain|continuous_slip_chain")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sp->parsed()) return cmd_sigma_points(dim, order, seed, out.empty() ? "sigma_points.csv" : out);
        if (solve->parsed()) return cmd_solve(algo, mdp_path, grid_res, alpha, seed, out.empty() ? "solve_out" : out);
        if (train->parsed()) {
            if (config.empty()) throw std::runtime_error("train: --config is required");
            return cmd_train(train_algo, config, seed, out);
        }
        if (eval_ccs_cmd->parsed()) {
            if (config.empty()) throw std::runtime_error("eval-ccs: --config is required");
            return cmd_eval_ccs(config, out);
        }
        if (eval_osi_cmd->parsed())
            return cmd_eval_osi(mdp_path, policy_path, mode_name, episodes, episode_len, osi_train_steps, seed,
                                out.empty() ? "eval_osi_out" : out);
        if (oracle->parsed()) return cmd_oracle(mdp_path, grid_res, cap, out.empty() ? "oracle_out" : out);
        if (env_export->parsed()) return cmd_env_export(env_name, out.empty() ? env_name + ".pmomdp" : out);
        if (env->parsed()) {
            std::cerr << "env: expected a subcommand (export)\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
