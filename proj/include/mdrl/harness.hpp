#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdrl/dp_solvers.hpp"
#include "mdrl/envs.hpp"
#include "mdrl/mdp.hpp"
#include "mdrl/osi.hpp"
#include "mdrl/rl_loop.hpp"

namespace mdrl {

struct ScoreStats {
    double mean = 0.0;
    double stderr_ = 0.0;
    double iqm = 0.0; ///< interquartile mean
    double iqr = 0.0; ///< interquartile range
    int n = 0;
    std::vector<double> samples; ///< per-trial preference-weighted returns
};

ScoreStats summarize(std::vector<double> samples);

/// One discounted episode in a single domain under a fixed policy slice.
double rollout_return(const MultiDomainMDP& mdp, int domain, const PolicyTable& policy, int episode_len, Rng rng);

/// Monte-Carlo linear-utility score: for each evaluation domain, average the
/// discounted returns of the preference-conditioned policy over `trials`
/// episodes, then take the preference-weighted mean. The preference picks the
/// conditioning cell on the training grid and the weights over the evaluation
/// domains (equal weights across a box's sigma-point domains).
ScoreStats ccs_score(const UniversalPolicy& policy, const PreferenceGrid& grid, const MultiDomainMDP& eval_mdp,
                     const Preference& pref, int trials, int episode_len, Rng rng);

enum class OsiMode { fixed_full, exact_bayes, ensemble };
OsiMode osi_mode_from_string(const std::string& name);
std::string osi_mode_name(OsiMode mode);

struct OsiEvalResult {
    std::vector<int> true_domain;      ///< per episode (round-robin over domains)
    std::vector<double> returns;       ///< per episode, discounted
    std::vector<Posterior> final_beliefs;
    std::vector<double> per_domain_mean;
    double mean_return = 0.0;
};

/// Rolls episodes with the policy conditioned per step on either the fixed
/// full-uncertainty preference or a belief propagated by the exact filter or
/// the ensemble identifier.
OsiEvalResult evaluate_with_osi(const UniversalPolicy& policy, const PreferenceGrid& grid, const MultiDomainMDP& mdp,
                                OsiMode mode, int episodes, int episode_len, const EnsembleOSI* osi, Rng rng);

struct ExperimentConfig {
    EnvSpec env;
    std::vector<std::string> algos; ///< solver names (dr, cmdrl, ...) and/or training names (cmdsac, ...)
    std::vector<std::uint64_t> seeds;
    int grid_resolution = 10;
    double alpha = 0.05;
    double tol = 1e-8;
    int trials = 16;
    int episode_len = 100;
    long total_steps = 200000;
    long warmup = 1000;
    int batch = 256;
    std::string out_dir = "results";
    std::vector<Preference> eval_prefs; ///< fixed published list per environment

    void validate() const;
};

ExperimentConfig default_experiment_config(const std::string& env_name);
/// key = value lines; '#' starts a comment. Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::string& path);

/// Per (algo, seed): solve or train, score every evaluation preference, and
/// write scores.csv / summary.csv (plus errors.csv when a cell fails).
/// Bitwise-reproducible per seed.
void run_experiment(const ExperimentConfig& cfg);

bool is_solver_algo(const std::string& name);
SolveResult run_solver(const std::string& name, const MultiDomainMDP& mdp, const PreferenceGrid& grid,
                       const SolveOptions& opts);

void save_qtable_csv(const QTable& q, const std::string& path);
void save_policy_csv(const UniversalPolicy& policy, const std::string& path);
UniversalPolicy load_policy_csv(const std::string& path);

} // namespace mdrl
