#pragma once

#include <string>
#include <vector>

#include "mdrl/mdp.hpp"
#include "mdrl/unscented.hpp"

namespace mdrl {

/// Named builder parameters for the built-in environments, plus the full
/// randomization box of the kappa space.
struct EnvSpec {
    std::string name;
    int length = 5;
    double slip_a = 0.1;
    double slip_b = 0.9;
    double step_cost = 0.01;
    double goal_reward = 1.0;
    double gamma = 0.9;
    std::vector<double> kappa_lo;
    std::vector<double> kappa_hi;
};

/// Chain of `length` states with actions {left, right}. The intended move
/// succeeds with probability 1 - slip and is reversed otherwise; moves are
/// clamped at the ends. The rightmost state is absorbing. Rewards are the
/// deterministic expected form r(s,a) = -step_cost + goal_reward * P(goal|s,a)
/// so the goal payout lands on the transition that enters it.
MultiDomainMDP build_two_domain_chain(int length = 5, double slip_a = 0.1, double slip_b = 0.9,
                                      double step_cost = 0.01, double goal_reward = 1.0, double gamma = 0.9);

/// Single-domain chain at an arbitrary slip; used to instantiate evaluation
/// domains at mapped sigma points.
MultiDomainMDP build_chain_at_slips(const std::vector<double>& slips, int length = 5, double step_cost = 0.01,
                                    double goal_reward = 1.0, double gamma = 0.9);

struct ContinuousSlipChain {
    MultiDomainMDP mdp;       ///< training domains: one per training sigma point
    MultiDomainMDP eval_mdp;  ///< held-out domains: one per evaluation sigma point
    SigmaPointSet train_points;
    SigmaPointSet eval_points;
    Preference full_box;      ///< the full randomization range as [mu, sigma]
    bool clipped = false;     ///< a mapped slip fell outside [0, 1] and was clipped
};

/// Discretizes a continuous slip range through sigma points: every training
/// point becomes one domain; the evaluation set is kept alongside for
/// held-out scoring.
ContinuousSlipChain build_continuous_slip_chain(int length, double kappa_lo, double kappa_hi,
                                                const SigmaPointSet& train, const SigmaPointSet& eval);

EnvSpec default_env_spec(const std::string& name);
MultiDomainMDP build_env(const EnvSpec& spec);
std::vector<std::string> builtin_env_names();

} // namespace mdrl
