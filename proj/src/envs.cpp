#include "mdrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdrl {

namespace {

DomainSpec make_chain_domain(int length, double slip, double step_cost, double goal_reward) {
    const int S = length;
    const int A = 2; // 0 = left, 1 = right
    const int goal = length - 1;
    DomainSpec dom;
    dom.kappa = {slip};
    dom.transition.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    dom.reward.assign(static_cast<std::size_t>(S) * A, 0.0);
    auto P = [&](int s, int a, int s2) -> double& {
        return dom.transition[(static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)) * S +
                              static_cast<std::size_t>(s2)];
    };
    auto R = [&](int s, int a) -> double& {
        return dom.reward[static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)];
    };
    for (int s = 0; s < S; ++s) {
        if (s == goal) {
            P(s, 0, s) = 1.0;
            P(s, 1, s) = 1.0;
            continue;
        }
        const int left = std::max(0, s - 1);
        const int right = std::min(goal, s + 1);
        // Intended move succeeds with 1 - slip, else reversed.
        P(s, 1, right) += 1.0 - slip;
        P(s, 1, left) += slip;
        P(s, 0, left) += 1.0 - slip;
        P(s, 0, right) += slip;
        for (int a = 0; a < A; ++a) R(s, a) = -step_cost + goal_reward * P(s, a, goal);
    }
    return dom;
}

} // namespace

MultiDomainMDP build_two_domain_chain(int length, double slip_a, double slip_b, double step_cost,
                                      double goal_reward, double gamma) {
    if (length < 3) throw std::invalid_argument("build_two_domain_chain: length must be >= 3");
    for (double slip : {slip_a, slip_b})
        if (!(slip >= 0.0 && slip <= 1.0)) throw std::invalid_argument("build_two_domain_chain: slip outside [0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("build_two_domain_chain: gamma out of range");
    MultiDomainMDP mdp;
    mdp.n_states = length;
    mdp.n_actions = 2;
    mdp.gamma = gamma;
    mdp.initial_dist.assign(static_cast<std::size_t>(length), 0.0);
    mdp.initial_dist[0] = 1.0;
    mdp.domains.push_back(make_chain_domain(length, slip_a, step_cost, goal_reward));
    mdp.domains.push_back(make_chain_domain(length, slip_b, step_cost, goal_reward));
    return mdp;
}

MultiDomainMDP build_chain_at_slips(const std::vector<double>& slips, int length, double step_cost,
                                    double goal_reward, double gamma) {
    if (length < 3) throw std::invalid_argument("build_chain_at_slips: length must be >= 3");
    if (slips.empty()) throw std::invalid_argument("build_chain_at_slips: need at least one slip");
    MultiDomainMDP mdp;
    mdp.n_states = length;
    mdp.n_actions = 2;
    mdp.gamma = gamma;
    mdp.initial_dist.assign(static_cast<std::size_t>(length), 0.0);
    mdp.initial_dist[0] = 1.0;
    for (double slip : slips) {
        if (!(slip >= 0.0 && slip <= 1.0)) throw std::invalid_argument("build_chain_at_slips: slip outside [0,1]");
        mdp.domains.push_back(make_chain_domain(length, slip, step_cost, goal_reward));
    }
    return mdp;
}

ContinuousSlipChain build_continuous_slip_chain(int length, double kappa_lo, double kappa_hi,
                                                const SigmaPointSet& train, const SigmaPointSet& eval) {
    if (!(kappa_lo < kappa_hi) || kappa_lo < 0.0 || kappa_hi > 1.0)
        throw std::invalid_argument("build_continuous_slip_chain: need 0 <= lo < hi <= 1");
    if (train.dim != 1 || eval.dim != 1)
        throw std::invalid_argument("build_continuous_slip_chain: sigma points must be one-dimensional");
    ContinuousSlipChain env;
    env.train_points = train;
    env.eval_points = eval;
    const double mu = 0.5 * (kappa_lo + kappa_hi);
    const double sigma = (kappa_hi - kappa_lo) / std::sqrt(12.0);
    env.full_box = Preference::box({mu}, {sigma});

    auto to_slips = [&](const SigmaPointSet& set) {
        auto mapped = map_sigma_points(set, env.full_box);
        std::vector<double> slips;
        for (double v : mapped) {
            if (v < 0.0 || v > 1.0) env.clipped = true;
            slips.push_back(std::clamp(v, 0.0, 1.0));
        }
        return slips;
    };
    env.mdp = build_chain_at_slips(to_slips(train), length);
    env.eval_mdp = build_chain_at_slips(to_slips(eval), length);
    return env;
}

EnvSpec default_env_spec(const std::string& name) {
    EnvSpec spec;
    spec.name = name;
    if (name == "two_domain_chain") {
        spec.kappa_lo = {0.1};
        spec.kappa_hi = {0.9};
        return spec;
    }
    if (name == "continuous_slip_chain") {
        spec.kappa_lo = {0.05};
        spec.kappa_hi = {0.95};
        return spec;
    }
    throw std::invalid_argument("unknown environment: " + name);
}

MultiDomainMDP build_env(const EnvSpec& spec) {
    if (spec.name == "two_domain_chain")
        return build_two_domain_chain(spec.length, spec.slip_a, spec.slip_b, spec.step_cost, spec.goal_reward,
                                      spec.gamma);
    if (spec.name == "continuous_slip_chain") {
        auto [train, eval] = solve_sigma_point_pair(1, 10, 1e-6, 12345);
        return build_continuous_slip_chain(spec.length, spec.kappa_lo[0], spec.kappa_hi[0], train, eval).mdp;
    }
    throw std::invalid_argument("unknown environment: " + spec.name);
}

std::vector<std::string> builtin_env_names() { return {"two_domain_chain", "continuous_slip_chain"}; }

} // namespace mdrl
