#pragma once

#include <span>
#include <string>
#include <vector>

#include "mdrl/rng.hpp"

namespace mdrl {

/// One expected discounted return per domain.
using ValueVector = std::vector<double>;

/// A single randomized environment: its parameter vector and tabular model.
struct DomainSpec {
    std::vector<double> kappa;      ///< domain parameters
    std::vector<double> transition; ///< [state][action][next] row-major probabilities
    std::vector<double> reward;     ///< [state][action]
};

/// Finite family of MDPs sharing state/action sets and the initial
/// distribution; only the per-domain kernels and rewards differ.
struct MultiDomainMDP {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.9;
    std::vector<double> initial_dist; ///< shared over domains
    std::vector<DomainSpec> domains;

    int n_domains() const { return static_cast<int>(domains.size()); }
    int kappa_dim() const { return domains.empty() ? 0 : static_cast<int>(domains[0].kappa.size()); }

    double p(int dom, int s, int a, int s2) const {
        return domains[dom].transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    std::span<const double> row(int dom, int s, int a) const {
        return std::span<const double>(
            domains[dom].transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states));
    }
    double r(int dom, int s, int a) const {
        return domains[dom].reward[static_cast<std::size_t>(s) * n_actions + a];
    }
    double max_abs_reward() const;
};

enum class PrefKind { discrete, uniform_box, delta };

/// Uncertainty over domains: a probability vector over the finite domain set,
/// or a uniform box over the parameter space encoded as mean and standard
/// deviation per coordinate.
struct Preference {
    PrefKind kind = PrefKind::discrete;
    std::vector<double> weights; ///< discrete/delta: over domains
    std::vector<double> mu;      ///< uniform-box: per kappa coordinate
    std::vector<double> sigma;   ///< uniform-box: per kappa coordinate, >= 0

    static Preference discrete(std::vector<double> w);
    static Preference delta(int domain, int n_domains);
    static Preference uniform(int n_domains);
    static Preference box(std::vector<double> mu, std::vector<double> sigma);

    bool is_box() const { return kind == PrefKind::uniform_box; }
    /// Box support endpoints [mu - sqrt(3) sigma, mu + sqrt(3) sigma] per coordinate.
    std::pair<std::vector<double>, std::vector<double>> support() const;
    /// Project onto the finite domain set: discrete weights over the kappas the
    /// box support covers (uniform density), falling back to the nearest kappa
    /// when the support covers none.
    std::vector<double> discretize(const std::vector<std::vector<double>>& kappas) const;
    void validate(int n_domains) const;
};

/// Finite cover of the preference simplex at resolution R: all compositions
/// (k_1/R, ..., k_n/R) with sum k_i = R, enumerated in ascending lexicographic
/// order. Always contains the n one-hot vertices.
struct PreferenceGrid {
    int n_domains = 0;
    int resolution = 0;
    std::vector<Preference> cells;

    static PreferenceGrid simplex(int n_domains, int resolution);
    static int default_resolution(int n_domains) { return n_domains <= 2 ? 10 : 4; }

    int n_cells() const { return static_cast<int>(cells.size()); }
    const std::vector<double>& weights(int cell) const { return cells[cell].weights; }
    int one_hot_cell(int domain) const;
    /// Cell with minimal Euclidean distance to w; ties to the lowest index.
    int nearest_cell(const std::vector<double>& w) const;
};

/// Report-style validation: empty result iff the MDP is well formed. Each entry
/// names the violated invariant and the offending (domain, state, action).
std::vector<std::string> validate_mdp(const MultiDomainMDP& mdp);

/// Draw s' from the domain's categorical row and return (s', r(s,a)).
std::pair<int, double> sample_transition(const MultiDomainMDP& mdp, int domain, int s, int a, Rng& rng);

/// Text serialization (documented key-value schema; exact round-trip reals).
std::string mdp_to_string(const MultiDomainMDP& mdp);
MultiDomainMDP mdp_from_string(const std::string& text);
void save_mdp(const MultiDomainMDP& mdp, const std::string& path);
MultiDomainMDP load_mdp(const std::string& path);

} // namespace mdrl
