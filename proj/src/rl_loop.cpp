#include "mdrl/rl_loop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "mdrl/io.hpp"

namespace mdrl {

Algo algo_from_string(const std::string& name) {
    if (name == "drsac") return Algo::drsac;
    if (name == "sirsa") return Algo::sirsa;
    if (name == "cmdsac") return Algo::cmdsac;
    if (name == "emdsac") return Algo::emdsac;
    if (name == "umdsirsa") return Algo::umdsirsa;
    if (name == "umdsac1") return Algo::umdsac1;
    if (name == "umdsac2") return Algo::umdsac2;
    throw std::invalid_argument("unknown training algorithm: " + name);
}

std::string algo_name(Algo algo) {
    switch (algo) {
    case Algo::drsac: return "drsac";
    case Algo::sirsa: return "sirsa";
    case Algo::cmdsac: return "cmdsac";
    case Algo::emdsac: return "emdsac";
    case Algo::umdsirsa: return "umdsirsa";
    case Algo::umdsac1: return "umdsac1";
    case Algo::umdsac2: return "umdsac2";
    }
    return "?";
}

bool algo_uses_osi_conditioning(Algo algo) { return algo == Algo::sirsa || algo == Algo::umdsirsa; }
bool algo_is_grid_conditioned(Algo algo) { return algo == Algo::cmdsac || algo == Algo::emdsac; }

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity_, 1 << 20));
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
    ++inserted_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int n, Rng& rng) const {
    if (n < 1) throw std::invalid_argument("ReplayBuffer::sample_indices: n must be >= 1");
    const std::size_t sz = data_.size();
    if (static_cast<std::size_t>(n) > sz)
        throw std::invalid_argument("ReplayBuffer::sample_indices: batch larger than buffer");
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(n));
    std::unordered_set<std::size_t> seen;
    while (out.size() < static_cast<std::size_t>(n)) {
        std::size_t idx = static_cast<std::size_t>(rng.next_int(static_cast<int>(sz)));
        if (seen.insert(idx).second) out.push_back(idx);
    }
    return out;
}

void TrainConfig::validate() const {
    if (warmup >= total_steps && total_steps > 0 && warmup != total_steps)
        throw std::invalid_argument("TrainConfig: warmup must be < total_steps");
    if (warmup > total_steps) throw std::invalid_argument("TrainConfig: warmup must be <= total_steps");
    if (!(polyak > 0.0 && polyak <= 1.0)) throw std::invalid_argument("TrainConfig: polyak must be in (0, 1]");
    if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("TrainConfig: alpha must be positive");
    if (episode_len < 1) throw std::invalid_argument("TrainConfig: episode_len must be >= 1");
    if (sirsa_subsets < 1) throw std::invalid_argument("TrainConfig: sirsa_subsets must be >= 1");
}

namespace {

// softmax over actions of E_{kappa ~ w}[min_j Q_j(s, ., kappa)] / alpha.
std::vector<double> policy_from_critics(const QTable& q1, const QTable& q2, int qcell, const std::vector<double>& w,
                                        int s, double alpha) {
    std::vector<double> qbar(static_cast<std::size_t>(q1.n_actions), 0.0);
    for (int dom = 0; dom < q1.n_domains; ++dom) {
        const double wd = w[static_cast<std::size_t>(dom)];
        if (wd == 0.0) continue;
        for (int a = 0; a < q1.n_actions; ++a)
            qbar[static_cast<std::size_t>(a)] += wd * std::min(q1.at(qcell, dom, s, a), q2.at(qcell, dom, s, a));
    }
    return soft_policy(qbar, alpha);
}

double entropy_backup_min(const QTable& t1, const QTable& t2, int qcell, int dom, int s2,
                          std::span<const double> pi, double alpha, bool literal) {
    double acc = 0.0;
    for (int a = 0; a < t1.n_actions; ++a) {
        const double pa = pi[static_cast<std::size_t>(a)];
        if (pa <= 0.0) continue;
        double v = std::min(t1.at(qcell, dom, s2, a), t2.at(qcell, dom, s2, a));
        if (!literal) v -= alpha * std::log(pa);
        acc += pa * v;
    }
    return acc;
}

std::vector<double> policy_row(const UniversalPolicy& policy, int cell, int s) {
    std::vector<double> pi(static_cast<std::size_t>(policy.n_actions));
    for (int a = 0; a < policy.n_actions; ++a) pi[static_cast<std::size_t>(a)] = policy.at(cell, s, a);
    return pi;
}

// Envelope filter against the min of the online critics and the cached policy:
// argmax over cells c of E_{a ~ pi(.|s,c)} [ w^T minQ(s,a,.,c) - alpha ln pi ].
int chi_envelope_min(const TdContext& ctx, int s, const std::vector<double>& w) {
    int best_cell = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < ctx.grid.n_cells(); ++c) {
        double obj = 0.0;
        for (int a = 0; a < ctx.online1.n_actions; ++a) {
            const double pa = ctx.policy.at(c, s, a);
            if (pa <= 0.0) continue;
            double qm = 0.0;
            for (int dom = 0; dom < ctx.online1.n_domains; ++dom)
                qm += w[static_cast<std::size_t>(dom)] *
                      std::min(ctx.online1.at(c, dom, s, a), ctx.online2.at(c, dom, s, a));
            obj += pa * (qm - ctx.alpha * std::log(pa));
        }
        if (obj > best) {
            best = obj;
            best_cell = c;
        }
    }
    return best_cell;
}

// Per-domain filter chi(s, kappa) for the utopia v2 target.
int chi_domain_min(const TdContext& ctx, int s, int dom) {
    int best_cell = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < ctx.grid.n_cells(); ++c) {
        double obj = 0.0;
        for (int a = 0; a < ctx.online1.n_actions; ++a) {
            const double pa = ctx.policy.at(c, s, a);
            if (pa <= 0.0) continue;
            double qm = std::min(ctx.online1.at(0, dom, s, a), ctx.online2.at(0, dom, s, a));
            obj += pa * (qm - ctx.alpha * std::log(pa));
        }
        if (obj > best) {
            best = obj;
            best_cell = c;
        }
    }
    return best_cell;
}

Posterior transition_prior(const Transition& t, const TdContext& ctx) {
    if (!t.belief_mu.empty()) return Posterior::from_moments(t.belief_mu, t.belief_sigma);
    const auto& pref = ctx.pref_registry[static_cast<std::size_t>(t.pref_id)];
    if (pref.is_box()) return Posterior::from_moments(pref.mu, pref.sigma);
    return Posterior::from_weights(pref.weights);
}

} // namespace

double td_target(Algo algo, const Transition& t, const TdContext& ctx) {
    const double g = ctx.gamma;
    if (g == 0.0) return t.r;
    switch (algo) {
    case Algo::drsac: {
        auto pi = policy_row(ctx.policy, 0, t.s2);
        return t.r + g * entropy_backup_min(ctx.target1, ctx.target2, 0, 0, t.s2, pi, ctx.alpha, ctx.literal);
    }
    case Algo::cmdsac: {
        auto pi = policy_row(ctx.policy, t.pref_id, t.s2);
        return t.r + g * entropy_backup_min(ctx.target1, ctx.target2, t.pref_id, t.kappa, t.s2, pi, ctx.alpha,
                                            ctx.literal);
    }
    case Algo::emdsac: {
        // Filtered next-action policy; target values stay on the stored cell.
        const int star = chi_envelope_min(ctx, t.s2, ctx.grid.weights(t.pref_id));
        auto pi = policy_row(ctx.policy, star, t.s2);
        return t.r +
               g * entropy_backup_min(ctx.target1, ctx.target2, t.pref_id, t.kappa, t.s2, pi, ctx.alpha, ctx.literal);
    }
    case Algo::umdsac1: {
        const int cell = ctx.grid.one_hot_cell(t.kappa);
        auto pi = policy_row(ctx.policy, cell, t.s2);
        return t.r + g * entropy_backup_min(ctx.target1, ctx.target2, 0, t.kappa, t.s2, pi, ctx.alpha, ctx.literal);
    }
    case Algo::umdsac2: {
        const int star = chi_domain_min(ctx, t.s2, t.kappa);
        auto pi = policy_row(ctx.policy, star, t.s2);
        return t.r + g * entropy_backup_min(ctx.target1, ctx.target2, 0, t.kappa, t.s2, pi, ctx.alpha, ctx.literal);
    }
    case Algo::sirsa:
    case Algo::umdsirsa: {
        if (!ctx.osi) throw std::invalid_argument("td_target: variant requires an identifier");
        Posterior belief = ensemble_predict(*ctx.osi, t.s, t.a, t.s2, transition_prior(t, ctx));
        auto w = belief.domain_weights(ctx.osi->kappas);
        auto pi = policy_from_critics(ctx.online1, ctx.online2, 0, w, t.s2, ctx.alpha);
        return t.r + g * entropy_backup_min(ctx.target1, ctx.target2, 0, t.kappa, t.s2, pi, ctx.alpha, ctx.literal);
    }
    }
    throw std::invalid_argument("td_target: unknown variant");
}

CriticLoss critic_update(QTable& q1, QTable& q2, std::span<const std::size_t> cells, std::span<const double> targets,
                         double lr) {
    if (cells.size() != targets.size() || cells.empty())
        throw std::invalid_argument("critic_update: batch shape mismatch or empty");
    CriticLoss loss;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double y = targets[i];
        double& a = q1.q[cells[i]];
        double& b = q2.q[cells[i]];
        loss.loss1 += (y - a) * (y - a);
        loss.loss2 += (y - b) * (y - b);
        a += lr * (y - a);
        b += lr * (y - b);
    }
    loss.loss1 /= static_cast<double>(cells.size());
    loss.loss2 /= static_cast<double>(cells.size());
    return loss;
}

double actor_update(UniversalPolicy& policy, const QTable& q1, const QTable& q2, const PreferenceGrid& grid,
                    std::span<const Transition> batch, std::span<const int> cond_cells, double alpha) {
    if (batch.empty() || batch.size() != cond_cells.size())
        throw std::invalid_argument("actor_update: batch shape mismatch or empty");
    const bool grid_cells = policy.n_cells == grid.n_cells();
    static const std::vector<double> kUnit = {1.0};
    std::unordered_set<long> visited;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const int cell = cond_cells[i];
        const int s = batch[i].s;
        if (!visited.insert(static_cast<long>(cell) * policy.n_states + s).second) continue;
        const std::vector<double>& w = grid_cells ? grid.weights(cell) : kUnit;
        const int qcell = q1.n_cells == policy.n_cells ? cell : 0;
        auto pi = policy_from_critics(q1, q2, qcell, w, s, alpha);
        for (int a = 0; a < policy.n_actions; ++a) policy.at(cell, s, a) = pi[static_cast<std::size_t>(a)];
    }
    // Post-update batch objective: E_pi[E_w min Q - alpha ln pi].
    double obj = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const int cell = cond_cells[i];
        const int s = batch[i].s;
        const std::vector<double>& w = grid_cells ? grid.weights(cell) : kUnit;
        const int qcell = q1.n_cells == policy.n_cells ? cell : 0;
        for (int a = 0; a < policy.n_actions; ++a) {
            const double pa = policy.at(cell, s, a);
            if (pa <= 0.0) continue;
            double qm = 0.0;
            for (int dom = 0; dom < q1.n_domains; ++dom)
                qm += w[static_cast<std::size_t>(dom)] * std::min(q1.at(qcell, dom, s, a), q2.at(qcell, dom, s, a));
            obj += pa * (qm - alpha * std::log(pa));
        }
    }
    return obj / static_cast<double>(batch.size());
}

void polyak_update(QTable& target, const QTable& online, double tau) {
    if (target.q.size() != online.q.size()) throw std::invalid_argument("polyak_update: shape mismatch");
    for (std::size_t i = 0; i < target.q.size(); ++i) target.q[i] = tau * online.q[i] + (1.0 - tau) * target.q[i];
}

std::vector<Preference> sirsa_sample_subsets(const std::vector<double>& lo, const std::vector<double>& hi, int B,
                                             Rng& rng) {
    if (B < 1) throw std::invalid_argument("sirsa_sample_subsets: B must be >= 1");
    if (lo.size() != hi.size()) throw std::invalid_argument("sirsa_sample_subsets: range shape mismatch");
    std::vector<Preference> out;
    out.reserve(static_cast<std::size_t>(B));
    const double inv_sqrt12 = 1.0 / std::sqrt(12.0);
    for (int b = 0; b < B; ++b) {
        std::vector<double> mu(lo.size()), sigma(lo.size());
        for (std::size_t c = 0; c < lo.size(); ++c) {
            double u = rng.uniform(lo[c], hi[c]);
            double v = rng.uniform(lo[c], hi[c]);
            if (u > v) std::swap(u, v);
            mu[c] = 0.5 * (u + v);
            sigma[c] = (v - u) * inv_sqrt12;
        }
        out.push_back(Preference::box(std::move(mu), std::move(sigma)));
    }
    return out;
}

namespace {

struct QShape {
    int cells;
    int domains;
};

QShape critic_shape(Algo algo, int n_cells, int n_domains) {
    if (algo == Algo::drsac) return {1, 1};
    if (algo_is_grid_conditioned(algo)) return {n_cells, n_domains};
    return {1, n_domains};
}

} // namespace

TrainResult run_training(const MultiDomainMDP& mdp, const TrainConfig& cfg) {
    cfg.validate();
    auto problems = validate_mdp(mdp);
    if (!problems.empty()) throw std::invalid_argument("run_training: invalid MDP: " + problems[0]);

    const int D = mdp.n_domains();
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    PreferenceGrid grid = PreferenceGrid::simplex(D, cfg.grid_resolution);
    const int C = grid.n_cells();
    const auto shape = critic_shape(cfg.algo, C, D);

    Rng root(cfg.seed);
    Rng env_rng = root.split(1);
    Rng pref_rng = root.split(2);
    Rng batch_rng = root.split(3);
    Rng osi_rng = root.split(4);
    Rng init_rng = root.split(5);

    // Preference registry: grid cells first, then algorithm-specific entries.
    std::vector<Preference> registry = grid.cells;
    std::vector<Preference> subsets;
    std::vector<double> lo(static_cast<std::size_t>(mdp.kappa_dim())), hi(lo.size());
    for (std::size_t c = 0; c < lo.size(); ++c) {
        lo[c] = std::numeric_limits<double>::infinity();
        hi[c] = -std::numeric_limits<double>::infinity();
        for (const auto& d : mdp.domains) {
            lo[c] = std::min(lo[c], d.kappa[c]);
            hi[c] = std::max(hi[c], d.kappa[c]);
        }
    }
    int full_pref_id = -1;
    if (cfg.algo == Algo::drsac) {
        registry.push_back(Preference::uniform(D));
        full_pref_id = static_cast<int>(registry.size()) - 1;
    }
    int subsets_base = static_cast<int>(registry.size());
    if (algo_uses_osi_conditioning(cfg.algo)) {
        subsets = sirsa_sample_subsets(lo, hi, cfg.sirsa_subsets, pref_rng);
        registry.insert(registry.end(), subsets.begin(), subsets.end());
    }

    TrainResult res;
    res.grid = grid;
    res.sirsa_subsets = subsets;
    res.q1 = QTable::zeros(shape.cells, shape.domains, S, A, cfg.alpha);
    res.q2 = QTable::zeros(shape.cells, shape.domains, S, A, cfg.alpha);
    if (cfg.optimistic_init != 0.0) {
        const double bound = (mdp.max_abs_reward() + cfg.alpha * std::log(static_cast<double>(A))) / (1.0 - mdp.gamma);
        const double init = cfg.optimistic_init * bound;
        for (auto& v : res.q1.q) v = init;
        for (auto& v : res.q2.q) v = init;
    }
    QTable t1 = res.q1, t2 = res.q2;
    const int policy_cells = cfg.algo == Algo::drsac ? 1 : C;
    res.policy = UniversalPolicy::uniform(policy_cells, S, A);
    res.osi = EnsembleOSI::make(mdp, lo, hi, cfg.osi_ensemble, cfg.osi_hidden, init_rng);
    res.dynamics = DynamicsModel::make(mdp);

    ReplayBuffer replay(cfg.replay_capacity);
    std::vector<std::vector<double>> kappas;
    for (const auto& d : mdp.domains) kappas.push_back(d.kappa);

    long c = 0;
    long episode = 0;
    long updates = 0;
    CriticLoss last_loss;
    double last_actor_obj = 0.0;
    const bool osi_conditioned = algo_uses_osi_conditioning(cfg.algo);
    const bool trains_osi = cfg.algo != Algo::drsac;

    while (c < cfg.total_steps) {
        // Per-episode preference and true domain.
        int pref_id;
        if (cfg.algo == Algo::drsac)
            pref_id = full_pref_id;
        else if (osi_conditioned)
            pref_id = subsets_base + pref_rng.next_int(cfg.sirsa_subsets);
        else
            pref_id = pref_rng.next_int(C);
        const Preference& episode_pref = registry[static_cast<std::size_t>(pref_id)];
        const int kappa = pref_rng.categorical(episode_pref.is_box() ? episode_pref.discretize(kappas)
                                                                     : episode_pref.weights);
        int s = env_rng.categorical(mdp.initial_dist);
        Posterior belief = Posterior::from_preference(episode_pref, kappas);
        double episode_return = 0.0;
        double discount = 1.0;

        for (int t = 0; t < cfg.episode_len && c < cfg.total_steps; ++t) {
            int a;
            if (c < cfg.warmup) {
                a = env_rng.next_int(A);
            } else if (osi_conditioned) {
                auto pi = policy_from_critics(res.q1, res.q2, 0, belief.domain_weights(kappas), s, cfg.alpha);
                a = env_rng.categorical(pi);
            } else {
                const int cell = cfg.algo == Algo::drsac ? 0 : pref_id;
                a = env_rng.categorical(policy_row(res.policy, cell, s));
            }
            auto [s2, r] = sample_transition(mdp, kappa, s, a, env_rng);
            episode_return += discount * r;
            discount *= mdp.gamma;

            Transition tr;
            tr.s = s;
            tr.a = a;
            tr.s2 = s2;
            tr.kappa = kappa;
            tr.pref_id = pref_id;
            tr.r = r;
            if (osi_conditioned) {
                auto [bmu, bsigma] = belief.kappa_moments(kappas);
                tr.belief_mu = bmu;
                tr.belief_sigma = bsigma;
            }
            replay.push(std::move(tr));

            if (c >= cfg.warmup) {
                const int n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), replay.size()));
                auto idx = replay.sample_indices(n, batch_rng);
                const double lr = cfg.lr0 / std::sqrt(1.0 + static_cast<double>(updates));

                std::vector<Transition> batch;
                batch.reserve(idx.size());
                for (auto i : idx) batch.push_back(replay.at(i));

                TdContext ctx{t1, t2, res.q1, res.q2, res.policy, grid, registry,
                              osi_conditioned ? &res.osi : nullptr, cfg.alpha, mdp.gamma, cfg.literal_td_target};
                std::vector<double> targets(batch.size());
                std::vector<std::size_t> cells(batch.size());
                std::vector<int> cond(batch.size());
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    const auto& b = batch[i];
                    targets[i] = td_target(cfg.algo, b, ctx);
                    const int qcell = algo_is_grid_conditioned(cfg.algo) ? b.pref_id : 0;
                    const int qdom = cfg.algo == Algo::drsac ? 0 : b.kappa;
                    cells[i] = res.q1.index(qcell, qdom, b.s, b.a);
                    if (cfg.algo == Algo::drsac)
                        cond[i] = 0;
                    else if (osi_conditioned)
                        cond[i] = grid.nearest_cell(b.belief_mu.empty()
                                                        ? registry[static_cast<std::size_t>(b.pref_id)].discretize(kappas)
                                                        : Posterior::from_moments(b.belief_mu, b.belief_sigma)
                                                              .domain_weights(kappas));
                    else
                        cond[i] = b.pref_id;
                }
                last_loss = critic_update(res.q1, res.q2, cells, targets, lr);
                last_actor_obj = actor_update(res.policy, res.q1, res.q2, grid, batch, cond, cfg.alpha);
                if (cfg.actor_refresh_every > 0 && updates % cfg.actor_refresh_every == 0) {
                    static const std::vector<double> kUnitW = {1.0};
                    for (int cell = 0; cell < res.policy.n_cells; ++cell)
                        for (int st = 0; st < S; ++st) {
                            const std::vector<double>& w =
                                cfg.algo == Algo::drsac ? kUnitW : grid.weights(cell);
                            const int qc = res.q1.n_cells == res.policy.n_cells ? cell : 0;
                            auto pi = policy_from_critics(res.q1, res.q2, qc, w, st, cfg.alpha);
                            for (int a2 = 0; a2 < A; ++a2) res.policy.at(cell, st, a2) = pi[static_cast<std::size_t>(a2)];
                        }
                }

                if (trains_osi && updates % cfg.osi_every == 0) {
                    const int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.osi_batch), replay.size()));
                    auto osi_idx = replay.sample_indices(m, osi_rng);
                    std::vector<OsiSample> osi_batch;
                    osi_batch.reserve(osi_idx.size());
                    for (auto i : osi_idx) {
                        const auto& b = replay.at(i);
                        OsiSample sample;
                        sample.s = b.s;
                        sample.a = b.a;
                        sample.s2 = b.s2;
                        sample.kappa = b.kappa;
                        sample.prior = b.belief_mu.empty()
                                           ? Posterior::from_preference(registry[static_cast<std::size_t>(b.pref_id)], kappas)
                                           : Posterior::from_moments(b.belief_mu, b.belief_sigma);
                        osi_batch.push_back(std::move(sample));
                    }
                    if (cfg.algo == Algo::sirsa)
                        ensemble_update_regression(res.osi, osi_batch, cfg.osi_lr, osi_rng);
                    else
                        ensemble_update(res.osi, res.dynamics, osi_batch, cfg.osi_lr, osi_rng);
                }
                polyak_update(t1, res.q1, cfg.polyak);
                polyak_update(t2, res.q2, cfg.polyak);
                ++updates;
            }
            if (osi_conditioned) belief = ensemble_predict(res.osi, s, a, s2, belief);
            s = s2;
            ++c;
        }
        EpisodeMetric m;
        m.step = c;
        m.episode = episode;
        m.episode_return = episode_return;
        m.critic_loss = 0.5 * (last_loss.loss1 + last_loss.loss2);
        m.actor_objective = last_actor_obj;
        m.osi_entropy = osi_conditioned ? belief.entropy()
                                        : Posterior::from_preference(episode_pref, kappas).entropy();
        res.metrics.push_back(m);
        ++episode;
    }

    // Export the exact projection of the final critics at every cell.
    static const std::vector<double> kUnit = {1.0};
    for (int cell = 0; cell < res.policy.n_cells; ++cell)
        for (int s = 0; s < S; ++s) {
            const std::vector<double>& w = cfg.algo == Algo::drsac ? kUnit : grid.weights(cell);
            const int qcell = res.q1.n_cells == res.policy.n_cells ? cell : 0;
            auto pi = policy_from_critics(res.q1, res.q2, qcell, w, s, cfg.alpha);
            for (int a = 0; a < A; ++a) res.policy.at(cell, s, a) = pi[static_cast<std::size_t>(a)];
        }
    return res;
}

void write_metrics_csv(const std::vector<EpisodeMetric>& metrics, const std::string& path) {
    CsvWriter csv(path, {"step", "episode", "return", "critic_loss", "actor_objective", "osi_entropy"});
    for (const auto& m : metrics)
        csv.row({std::to_string(m.step), std::to_string(m.episode)},
                {m.episode_return, m.critic_loss, m.actor_objective, m.osi_entropy});
}

} // namespace mdrl
