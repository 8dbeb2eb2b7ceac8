#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdrl/dp_solvers.hpp"
#include "mdrl/mdp.hpp"
#include "mdrl/osi.hpp"
#include "mdrl/rng.hpp"

namespace mdrl {

enum class Algo { drsac, sirsa, cmdsac, emdsac, umdsirsa, umdsac1, umdsac2 };
Algo algo_from_string(const std::string& name);
std::string algo_name(Algo algo);
bool algo_uses_osi_conditioning(Algo algo); ///< sirsa, umdsirsa
bool algo_is_grid_conditioned(Algo algo);   ///< cmdsac, emdsac (critic carries the cell index)

struct Transition {
    int s = 0, a = 0, s2 = 0;
    int kappa = 0;   ///< true domain index of the episode
    int pref_id = 0; ///< registry index of the episode preference
    double r = 0.0;
    /// Belief in effect when the step was sampled (empty for grid-conditioned
    /// episodes, where it equals the registry preference).
    std::vector<double> belief_mu, belief_sigma;
};

/// Ring buffer; sampling is without replacement within a batch and never
/// yields a transition older than `capacity` insertions ago.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);
    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t total_inserted() const { return inserted_; }
    const Transition& at(std::size_t i) const { return data_[i]; }
    std::vector<std::size_t> sample_indices(int n, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::uint64_t inserted_ = 0;
    std::vector<Transition> data_;
};

struct TrainConfig {
    Algo algo = Algo::cmdsac;
    long total_steps = 200000;
    long warmup = 1000;
    int batch = 256;
    double polyak = 0.005;
    double alpha = 0.05;
    int grid_resolution = 10;
    std::uint64_t seed = 0;
    int sirsa_subsets = 100;
    int episode_len = 40;
    std::size_t replay_capacity = 100000;
    double lr0 = 0.1;               ///< tabular critic learning rate, decays as 1/sqrt(t)
    bool literal_td_target = false; ///< drop the entropy term from TD targets
    int osi_batch = 64;             ///< transitions per identifier update
    int osi_every = 4;              ///< identifier update period in environment steps
    double osi_lr = 0.02;
    int osi_hidden = 32;
    int osi_ensemble = 4;
    /// Critic tables start at this fraction of the soft value bound.
    double optimistic_init = 0.0;
    /// Full exact-projection refresh of the cached actor every this many
    /// updates (0 disables). Keeps rarely-visited (cell, state) rows from
    /// going stale in the training-time backups.
    int actor_refresh_every = 10;

    void validate() const;
};

/// Everything a TD-target evaluation needs besides the transition itself.
struct TdContext {
    const QTable& target1;
    const QTable& target2;
    const QTable& online1;
    const QTable& online2;
    const UniversalPolicy& policy;
    const PreferenceGrid& grid;
    const std::vector<Preference>& pref_registry;
    const EnsembleOSI* osi = nullptr;
    double alpha = 0.05;
    double gamma = 0.9;
    bool literal = false;
};

/// Variant-specific one-step target: r + gamma E_{a'}[min_j targetQ_j - alpha ln pi]
/// with the next-action preference chosen per algorithm (stored cell, filtered
/// cell, delta at the true domain, or the identifier's belief).
double td_target(Algo algo, const Transition& t, const TdContext& ctx);

struct CriticLoss {
    double loss1 = 0.0;
    double loss2 = 0.0;
};

/// Tabular SGD on the squared TD error of both critics at the batch cells.
CriticLoss critic_update(QTable& q1, QTable& q2, std::span<const std::size_t> cells,
                         std::span<const double> targets, double lr);

/// Exact KL projection of the policy at every (cell, state) visited in the
/// batch; returns the mean post-update soft objective over the batch.
double actor_update(UniversalPolicy& policy, const QTable& q1, const QTable& q2, const PreferenceGrid& grid,
                    std::span<const Transition> batch, std::span<const int> cond_cells, double alpha);

/// Elementwise target <- tau * online + (1 - tau) * target.
void polyak_update(QTable& target, const QTable& online, double tau);

/// B uniform-box preferences with supports uniformly sampled inside [lo, hi].
std::vector<Preference> sirsa_sample_subsets(const std::vector<double>& lo, const std::vector<double>& hi, int B,
                                             Rng& rng);

struct EpisodeMetric {
    long step = 0;
    long episode = 0;
    double episode_return = 0.0;
    double critic_loss = 0.0;
    double actor_objective = 0.0;
    double osi_entropy = 0.0;
};

struct TrainResult {
    QTable q1, q2;
    UniversalPolicy policy; ///< final exact projection at every grid cell
    PreferenceGrid grid;
    std::vector<EpisodeMetric> metrics;
    EnsembleOSI osi;
    DynamicsModel dynamics;
    std::vector<Preference> sirsa_subsets;
};

/// Full training skeleton: per-episode preference sampling, warmup random
/// actions, per-step replay/update/target blending, and belief propagation for
/// the identifier-conditioned variants. Deterministic given the seed.
TrainResult run_training(const MultiDomainMDP& mdp, const TrainConfig& cfg);

void write_metrics_csv(const std::vector<EpisodeMetric>& metrics, const std::string& path);

} // namespace mdrl
