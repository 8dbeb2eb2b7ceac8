#pragma once

#include <vector>

#include "mdrl/mdp.hpp"

namespace mdrl {

/// Row-stochastic action distribution per state.
struct PolicyTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> p; ///< [state][action]

    static PolicyTable uniform(int n_states, int n_actions);
    static PolicyTable deterministic(const std::vector<int>& actions, int n_actions);
    double at(int s, int a) const { return p[static_cast<std::size_t>(s) * n_actions + a]; }
    double& at(int s, int a) { return p[static_cast<std::size_t>(s) * n_actions + a]; }
};

/// Preference-conditioned policy: one action distribution per (grid cell, state).
struct UniversalPolicy {
    int n_cells = 0;
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> p; ///< [cell][state][action]

    static UniversalPolicy uniform(int n_cells, int n_states, int n_actions);
    double at(int cell, int s, int a) const {
        return p[(static_cast<std::size_t>(cell) * n_states + s) * n_actions + a];
    }
    double& at(int cell, int s, int a) {
        return p[(static_cast<std::size_t>(cell) * n_states + s) * n_actions + a];
    }
    PolicyTable slice(int cell) const;
};

/// Exact entropy-regularized evaluation of a fixed policy: for every domain i,
/// the fixed point of V_i = E_pi[r_i - alpha ln pi + gamma P_i V_i], obtained
/// by solving (I - gamma P_pi,i) V_i = r_pi,i directly. alpha = 0 gives the
/// plain expected discounted return. Result is indexed [state][domain].
std::vector<ValueVector> policy_value_exact(const MultiDomainMDP& mdp, const PolicyTable& policy, double alpha);

/// Initial-distribution-weighted per-domain value of a policy.
ValueVector value_at_initial(const MultiDomainMDP& mdp, const PolicyTable& policy, double alpha);

/// Dense Gaussian elimination with partial pivoting; throws on a singular
/// system (cannot happen for gamma < 1, reported as an internal error).
std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b, int n);

} // namespace mdrl
