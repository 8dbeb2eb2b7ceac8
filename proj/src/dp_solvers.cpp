#include "mdrl/dp_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mdrl/io.hpp"

namespace mdrl {

QTable QTable::zeros(int n_cells, int n_domains, int n_states, int n_actions, double alpha) {
    QTable t;
    t.n_cells = n_cells;
    t.n_domains = n_domains;
    t.n_states = n_states;
    t.n_actions = n_actions;
    t.alpha = alpha;
    t.q.assign(static_cast<std::size_t>(n_cells) * n_domains * n_states * n_actions, 0.0);
    return t;
}

double QTable::max_abs() const {
    double m = 0.0;
    for (double v : q) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> soft_policy(std::span<const double> qbar, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("soft_policy: alpha must be positive");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : qbar) {
        if (!std::isfinite(v)) throw std::invalid_argument("soft_policy: non-finite input");
        m = std::max(m, v);
    }
    std::vector<double> p(qbar.size());
    double z = 0.0;
    for (std::size_t a = 0; a < qbar.size(); ++a) {
        p[a] = std::exp((qbar[a] - m) / alpha);
        z += p[a];
    }
    for (double& v : p) v /= z;
    return p;
}

double soft_value(std::span<const double> qbar, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("soft_value: alpha must be positive");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : qbar) {
        if (!std::isfinite(v)) throw std::invalid_argument("soft_value: non-finite input");
        m = std::max(m, v);
    }
    double z = 0.0;
    for (double v : qbar) z += std::exp((v - m) / alpha);
    return m + alpha * std::log(z);
}

std::vector<double> mixture_q(const QTable& q, int cell, const std::vector<double>& w, int s) {
    std::vector<double> qbar(static_cast<std::size_t>(q.n_actions), 0.0);
    for (int dom = 0; dom < q.n_domains; ++dom) {
        const double wd = w[static_cast<std::size_t>(dom)];
        if (wd == 0.0) continue;
        for (int a = 0; a < q.n_actions; ++a) qbar[static_cast<std::size_t>(a)] += wd * q.at(cell, dom, s, a);
    }
    return qbar;
}

namespace {

// Expected next-state term under a fixed action distribution:
// sum_a pi(a) (Q(s,a) - alpha ln pi(a)), with the 0 ln 0 = 0 convention.
double policy_backup(const QTable& q, int cell, int dom, int s, const UniversalPolicy& policy, int pcell,
                     double alpha) {
    double acc = 0.0;
    for (int a = 0; a < q.n_actions; ++a) {
        const double pa = policy.at(pcell, s, a);
        if (pa <= 0.0) continue;
        acc += pa * (q.at(cell, dom, s, a) - alpha * std::log(pa));
    }
    return acc;
}

// One conditioned-solver fixed point at a fixed weight vector; writes Q into
// cell `cell` of `q` and the policy into cell `cell` of `policy`.
struct CellStatus {
    bool converged = false;
    int iterations = 0;
    double final_delta = 0.0;
    std::vector<double> delta_log;
};

// Averaging factor for the coupled sweeps. The raw coupled backup (policy
// recomputed from the mixture each sweep) is not a contraction per domain and
// enters period-2 limit cycles on mixed preferences; the half-averaged update
// keeps the same fixed point and settles. Convergence is measured on the
// undamped Bellman residual.
constexpr double kSweepAveraging = 0.5;

CellStatus solve_fixed_weights(const MultiDomainMDP& mdp, const std::vector<double>& w, const SolveOptions& opts,
                               QTable& q, UniversalPolicy& policy, int cell) {
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const int D = mdp.n_domains();
    std::vector<double> next(static_cast<std::size_t>(D) * S * A, 0.0);
    std::vector<double> inner(static_cast<std::size_t>(D) * S, 0.0);
    CellStatus status;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        for (int s = 0; s < S; ++s) {
            auto pi = soft_policy(mixture_q(q, cell, w, s), opts.alpha);
            for (int a = 0; a < A; ++a) policy.at(cell, s, a) = pi[static_cast<std::size_t>(a)];
        }
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                inner[static_cast<std::size_t>(dom) * S + s] = policy_backup(q, cell, dom, s, policy, cell, opts.alpha);
        double delta = 0.0;
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double acc = mdp.r(dom, s, a);
                    auto row = mdp.row(dom, s, a);
                    for (int s2 = 0; s2 < S; ++s2)
                        acc += mdp.gamma * row[static_cast<std::size_t>(s2)] *
                               inner[static_cast<std::size_t>(dom) * S + s2];
                    next[(static_cast<std::size_t>(dom) * S + s) * A + a] = acc;
                    delta = std::max(delta, std::abs(acc - q.at(cell, dom, s, a)));
                }
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double& cur = q.at(cell, dom, s, a);
                    cur += kSweepAveraging * (next[(static_cast<std::size_t>(dom) * S + s) * A + a] - cur);
                }
        status.iterations = iter + 1;
        status.final_delta = delta;
        status.delta_log.push_back(delta);
        if (delta <= opts.tol) {
            status.converged = true;
            break;
        }
    }
    // Policy consistent with the final table.
    for (int s = 0; s < S; ++s) {
        auto pi = soft_policy(mixture_q(q, cell, w, s), opts.alpha);
        for (int a = 0; a < A; ++a) policy.at(cell, s, a) = pi[static_cast<std::size_t>(a)];
    }
    return status;
}

// Per-domain soft-optimal tables, used to seed the multi-start below.
std::vector<std::vector<double>> per_domain_soft_q(const MultiDomainMDP& mdp, const SolveOptions& opts) {
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(mdp.n_domains()));
    for (int dom = 0; dom < mdp.n_domains(); ++dom) {
        std::vector<double> q(static_cast<std::size_t>(S) * A, 0.0), next(q);
        std::vector<double> v(static_cast<std::size_t>(S));
        std::vector<double> row_q(static_cast<std::size_t>(A));
        for (int iter = 0; iter < opts.max_iter; ++iter) {
            for (int s = 0; s < S; ++s) {
                for (int a = 0; a < A; ++a) row_q[static_cast<std::size_t>(a)] = q[static_cast<std::size_t>(s) * A + a];
                v[static_cast<std::size_t>(s)] = soft_value(row_q, opts.alpha);
            }
            double delta = 0.0;
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double acc = mdp.r(dom, s, a);
                    auto row = mdp.row(dom, s, a);
                    for (int s2 = 0; s2 < S; ++s2)
                        acc += mdp.gamma * row[static_cast<std::size_t>(s2)] * v[static_cast<std::size_t>(s2)];
                    next[static_cast<std::size_t>(s) * A + a] = acc;
                    delta = std::max(delta, std::abs(acc - q[static_cast<std::size_t>(s) * A + a]));
                }
            q.swap(next);
            if (delta <= opts.tol) break;
        }
        out[static_cast<std::size_t>(dom)] = std::move(q);
    }
    return out;
}

// The coupled iteration has multiple attracting fixed points on conflicting
// domains; a compromise attractor can sit far below the best committed
// policy. Each cell therefore solves from a zero table and from every
// per-domain optimal table, keeping the fixed point with the highest
// scalarized soft value at the initial distribution.
CellStatus solve_cell_multistart(const MultiDomainMDP& mdp, const std::vector<double>& w, const SolveOptions& opts,
                                 QTable& q, UniversalPolicy& policy, int cell,
                                 const std::vector<std::vector<double>>& seeds) {
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const int D = mdp.n_domains();
    const std::size_t slice = static_cast<std::size_t>(D) * S * A;

    CellStatus best_status;
    std::vector<double> best_q;
    std::vector<double> best_pi;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int candidate = 0; candidate <= static_cast<int>(seeds.size()); ++candidate) {
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    q.at(cell, dom, s, a) =
                        candidate == 0 ? 0.0
                                       : seeds[static_cast<std::size_t>(candidate - 1)][static_cast<std::size_t>(s) * A + a];
        auto status = solve_fixed_weights(mdp, w, opts, q, policy, cell);
        double value = scalarized_soft_value(mdp, policy.slice(cell), w, opts.alpha);
        if (!status.converged) value = -std::numeric_limits<double>::infinity();
        if (value > best_value || candidate == 0) {
            best_value = value;
            best_status = std::move(status);
            best_q.assign(q.q.begin() + static_cast<std::ptrdiff_t>(cell) * static_cast<std::ptrdiff_t>(slice),
                          q.q.begin() + static_cast<std::ptrdiff_t>(cell + 1) * static_cast<std::ptrdiff_t>(slice));
            best_pi.assign(policy.p.begin() + static_cast<std::ptrdiff_t>(cell) * S * A,
                           policy.p.begin() + static_cast<std::ptrdiff_t>(cell + 1) * S * A);
        }
    }
    std::copy(best_q.begin(), best_q.end(), q.q.begin() + static_cast<std::ptrdiff_t>(cell) * static_cast<std::ptrdiff_t>(slice));
    std::copy(best_pi.begin(), best_pi.end(), policy.p.begin() + static_cast<std::ptrdiff_t>(cell) * S * A);
    return best_status;
}

double soft_value_bound(const MultiDomainMDP& mdp, double alpha) {
    return (mdp.max_abs_reward() + alpha * std::log(static_cast<double>(mdp.n_actions))) / (1.0 - mdp.gamma);
}

} // namespace

SolveResult solve_dr(const MultiDomainMDP& mdp, const Preference& pref, const SolveOptions& opts) {
    pref.validate(mdp.n_domains());
    if (pref.is_box()) throw std::invalid_argument("solve_dr: preference must be discrete over the domains");
    SolveResult res;
    res.q = QTable::zeros(1, mdp.n_domains(), mdp.n_states, mdp.n_actions, opts.alpha);
    res.policy = UniversalPolicy::uniform(1, mdp.n_states, mdp.n_actions);
    auto seeds = per_domain_soft_q(mdp, opts);
    auto status = solve_cell_multistart(mdp, pref.weights, opts, res.q, res.policy, 0, seeds);
    res.converged = status.converged;
    res.iterations = status.iterations;
    res.final_delta = status.final_delta;
    res.delta_log = std::move(status.delta_log);
    return res;
}

SolveResult solve_cmdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    if (grid.n_domains != mdp.n_domains()) throw std::invalid_argument("solve_cmdrl: grid/domain mismatch");
    const int C = grid.n_cells();
    SolveResult res;
    res.q = QTable::zeros(C, mdp.n_domains(), mdp.n_states, mdp.n_actions, opts.alpha);
    res.policy = UniversalPolicy::uniform(C, mdp.n_states, mdp.n_actions);
    std::vector<CellStatus> status(static_cast<std::size_t>(C));
    const auto seeds = per_domain_soft_q(mdp, opts);
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (int c = 0; c < C; ++c)
        status[static_cast<std::size_t>(c)] = solve_cell_multistart(mdp, grid.weights(c), opts, res.q, res.policy, c, seeds);
    res.converged = true;
    res.cell_converged.resize(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        const auto& st = status[static_cast<std::size_t>(c)];
        res.cell_converged[static_cast<std::size_t>(c)] = st.converged ? 1 : 0;
        res.converged = res.converged && st.converged;
        res.iterations = std::max(res.iterations, st.iterations);
        res.final_delta = std::max(res.final_delta, st.final_delta);
    }
    return res;
}

namespace {

double filter_objective(const QTable& q, const UniversalPolicy& policy, const std::vector<double>& w, int state,
                        int cell) {
    double obj = 0.0;
    for (int a = 0; a < q.n_actions; ++a) {
        const double pa = policy.at(cell, state, a);
        if (pa <= 0.0) continue;
        double qmix = 0.0;
        for (int dom = 0; dom < q.n_domains; ++dom)
            qmix += w[static_cast<std::size_t>(dom)] * q.at(cell, dom, state, a);
        obj += pa * (qmix - q.alpha * std::log(pa));
    }
    return obj;
}

// The filter used inside the envelope sweeps keeps its previous pick unless a
// strictly better cell appears. Without the hysteresis the filter flips
// between tied anchor cells every sweep and the iteration never settles.
int filtered_cell_sticky(const QTable& q, const UniversalPolicy& policy, const PreferenceGrid& grid, int state,
                         int omega_cell, int previous) {
    constexpr double kHysteresis = 1e-9;
    const auto& w = grid.weights(omega_cell);
    int best_cell = previous;
    double best = filter_objective(q, policy, w, state, previous) + kHysteresis;
    for (int c = 0; c < grid.n_cells(); ++c) {
        if (c == previous) continue;
        const double obj = filter_objective(q, policy, w, state, c);
        if (obj > best) {
            best = obj;
            best_cell = c;
        }
    }
    return best_cell;
}

} // namespace

int envelope_filter(const QTable& q, const UniversalPolicy& policy, const PreferenceGrid& grid, int state,
                    int omega_cell) {
    const auto& w = grid.weights(omega_cell);
    int best_cell = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < grid.n_cells(); ++c) {
        const double obj = filter_objective(q, policy, w, state, c);
        if (obj > best) {
            best = obj;
            best_cell = c;
        }
    }
    return best_cell;
}

SolveResult solve_emdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    if (grid.n_domains != mdp.n_domains()) throw std::invalid_argument("solve_emdrl: grid/domain mismatch");
    const int C = grid.n_cells();
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const int D = mdp.n_domains();
    SolveResult res;
    res.q = QTable::zeros(C, D, S, A, opts.alpha);
    res.policy = UniversalPolicy::uniform(C, S, A);
    res.chi.assign(static_cast<std::size_t>(C) * S, 0);
    QTable next = res.q;
    const double bound = soft_value_bound(mdp, opts.alpha);
    // inner[(c, dom, s')] = filtered next-state backup for target cell c.
    std::vector<double> inner(static_cast<std::size_t>(C) * D * S, 0.0);

    // The filter assignment is explored with sticky updates first and then
    // frozen, the tabular analogue of the slowly-updated solver network: with
    // chi fixed the sweep is a plain policy-evaluation contraction, while a
    // free-running argmax can cycle between near-tied anchor cells forever.
    const int explore_sweeps = std::min(opts.max_iter / 2, 2000);
    int stable_sweeps = 0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
#pragma omp parallel for schedule(static) if (opts.parallel)
        for (int c = 0; c < C; ++c)
            for (int s = 0; s < S; ++s) {
                auto pi = soft_policy(mixture_q(res.q, c, grid.weights(c), s), opts.alpha);
                for (int a = 0; a < A; ++a) res.policy.at(c, s, a) = pi[static_cast<std::size_t>(a)];
            }
        const bool freeze_chi = iter >= explore_sweeps || stable_sweeps >= 50;
        if (!freeze_chi) {
            bool changed = false;
#pragma omp parallel for schedule(static) if (opts.parallel)
            for (int c = 0; c < C; ++c)
                for (int s = 0; s < S; ++s) {
                    const int prev = res.chi[static_cast<std::size_t>(c) * S + s];
                    const int next_cell = filtered_cell_sticky(res.q, res.policy, grid, s, c, prev);
                    if (next_cell != prev) changed = true;
                    res.chi[static_cast<std::size_t>(c) * S + s] = next_cell;
                }
            stable_sweeps = changed ? 0 : stable_sweeps + 1;
        }
        // Stabilized targets: the filtered cell supplies the next-state action
        // distribution while the values stay on the cell's own critic, so each
        // sweep is a policy-evaluation contraction.
#pragma omp parallel for schedule(static) if (opts.parallel)
        for (int c = 0; c < C; ++c)
            for (int dom = 0; dom < D; ++dom)
                for (int s = 0; s < S; ++s) {
                    const int star = res.chi[static_cast<std::size_t>(c) * S + s];
                    inner[(static_cast<std::size_t>(c) * D + dom) * S + s] =
                        policy_backup(res.q, c, dom, s, res.policy, star, opts.alpha);
                }
        double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) if (opts.parallel)
        for (int c = 0; c < C; ++c)
            for (int dom = 0; dom < D; ++dom)
                for (int s = 0; s < S; ++s)
                    for (int a = 0; a < A; ++a) {
                        double acc = mdp.r(dom, s, a);
                        auto row = mdp.row(dom, s, a);
                        for (int s2 = 0; s2 < S; ++s2)
                            acc += mdp.gamma * row[static_cast<std::size_t>(s2)] *
                                   inner[(static_cast<std::size_t>(c) * D + dom) * S + s2];
                        next.at(c, dom, s, a) = acc;
                        delta = std::max(delta, std::abs(acc - res.q.at(c, dom, s, a)));
                    }
        for (std::size_t i = 0; i < res.q.q.size(); ++i)
            res.q.q[i] += kSweepAveraging * (next.q[i] - res.q.q[i]);
        res.iterations = iter + 1;
        res.final_delta = delta;
        res.delta_log.push_back(delta);
        if (res.q.max_abs() > 10.0 * bound) {
            std::ostringstream msg;
            msg << "solve_emdrl diverged at iteration " << res.iterations << ": |Q| = " << res.q.max_abs()
                << " exceeds 10x soft value bound " << bound;
            throw std::runtime_error(msg.str());
        }
        if (delta <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    // Final policy and filter consistent with the converged table.
    for (int c = 0; c < C; ++c)
        for (int s = 0; s < S; ++s) {
            auto pi = soft_policy(mixture_q(res.q, c, grid.weights(c), s), opts.alpha);
            for (int a = 0; a < A; ++a) res.policy.at(c, s, a) = pi[static_cast<std::size_t>(a)];
        }
    for (int c = 0; c < C; ++c)
        for (int s = 0; s < S; ++s)
            res.chi[static_cast<std::size_t>(c) * S + s] = envelope_filter(res.q, res.policy, grid, s, c);
    return res;
}

namespace {

// Shared core of the utopia solvers. When chi is null the next-state policy is
// the delta-preference softmax of the domain's own Q (v1); otherwise it is the
// universal policy at the filtered cell (v2).
void umdrl_universal_policy(const QTable& q, const PreferenceGrid& grid, UniversalPolicy& policy, double alpha,
                            bool parallel) {
    const int C = grid.n_cells();
#pragma omp parallel for schedule(static) if (parallel)
    for (int c = 0; c < C; ++c)
        for (int s = 0; s < q.n_states; ++s) {
            auto pi = soft_policy(mixture_q(q, 0, grid.weights(c), s), alpha);
            for (int a = 0; a < q.n_actions; ++a) policy.at(c, s, a) = pi[static_cast<std::size_t>(a)];
        }
}

} // namespace

SolveResult solve_umdrl_v1(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    if (grid.n_domains != mdp.n_domains()) throw std::invalid_argument("solve_umdrl_v1: grid/domain mismatch");
    for (int d = 0; d < mdp.n_domains(); ++d) grid.one_hot_cell(d); // throws if missing
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const int D = mdp.n_domains();
    SolveResult res;
    res.q = QTable::zeros(1, D, S, A, opts.alpha);
    QTable next = res.q;
    // Per-domain soft value iteration: the delta-preference policy is the
    // softmax of the domain's own Q, so the backup closes to soft_value.
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) if (opts.parallel)
        for (int dom = 0; dom < D; ++dom) {
            std::vector<double> v(static_cast<std::size_t>(S));
            std::vector<double> qrow(static_cast<std::size_t>(A));
            for (int s = 0; s < S; ++s) {
                for (int a = 0; a < A; ++a) qrow[static_cast<std::size_t>(a)] = res.q.at(0, dom, s, a);
                v[static_cast<std::size_t>(s)] = soft_value(qrow, opts.alpha);
            }
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double acc = mdp.r(dom, s, a);
                    auto row = mdp.row(dom, s, a);
                    for (int s2 = 0; s2 < S; ++s2)
                        acc += mdp.gamma * row[static_cast<std::size_t>(s2)] * v[static_cast<std::size_t>(s2)];
                    next.at(0, dom, s, a) = acc;
                    delta = std::max(delta, std::abs(acc - res.q.at(0, dom, s, a)));
                }
        }
        res.q.q.swap(next.q);
        res.iterations = iter + 1;
        res.final_delta = delta;
        res.delta_log.push_back(delta);
        if (delta <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.policy = UniversalPolicy::uniform(grid.n_cells(), S, A);
    umdrl_universal_policy(res.q, grid, res.policy, opts.alpha, opts.parallel);
    return res;
}

SolveResult solve_umdrl_v2(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    if (grid.n_domains != mdp.n_domains()) throw std::invalid_argument("solve_umdrl_v2: grid/domain mismatch");
    for (int d = 0; d < mdp.n_domains(); ++d) grid.one_hot_cell(d);
    const int C = grid.n_cells();
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const int D = mdp.n_domains();
    SolveResult res;
    res.q = QTable::zeros(1, D, S, A, opts.alpha);
    res.policy = UniversalPolicy::uniform(C, S, A);
    res.chi.assign(static_cast<std::size_t>(D) * S, 0);
    QTable next = res.q;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        umdrl_universal_policy(res.q, grid, res.policy, opts.alpha, opts.parallel);
        // chi(s, kappa): grid cell whose policy maximizes the per-domain soft
        // objective E_pi[Q(s,a,kappa) - alpha ln pi]; sticky under ties, as in
        // the envelope sweep.
#pragma omp parallel for schedule(static) if (opts.parallel)
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s) {
                const int prev = res.chi[static_cast<std::size_t>(dom) * S + s];
                int best_cell = prev;
                double best = policy_backup(res.q, 0, dom, s, res.policy, prev, opts.alpha) + 1e-9;
                for (int c = 0; c < C; ++c) {
                    if (c == prev) continue;
                    double obj = policy_backup(res.q, 0, dom, s, res.policy, c, opts.alpha);
                    if (obj > best) {
                        best = obj;
                        best_cell = c;
                    }
                }
                res.chi[static_cast<std::size_t>(dom) * S + s] = best_cell;
            }
        double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) if (opts.parallel)
        for (int dom = 0; dom < D; ++dom) {
            std::vector<double> inner(static_cast<std::size_t>(S));
            for (int s = 0; s < S; ++s)
                inner[static_cast<std::size_t>(s)] =
                    policy_backup(res.q, 0, dom, s, res.policy, res.chi[static_cast<std::size_t>(dom) * S + s],
                                  opts.alpha);
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double acc = mdp.r(dom, s, a);
                    auto row = mdp.row(dom, s, a);
                    for (int s2 = 0; s2 < S; ++s2)
                        acc += mdp.gamma * row[static_cast<std::size_t>(s2)] * inner[static_cast<std::size_t>(s2)];
                    next.at(0, dom, s, a) = acc;
                    delta = std::max(delta, std::abs(acc - res.q.at(0, dom, s, a)));
                }
        }
        for (std::size_t i = 0; i < res.q.q.size(); ++i)
            res.q.q[i] += kSweepAveraging * (next.q[i] - res.q.q[i]);
        res.iterations = iter + 1;
        res.final_delta = delta;
        res.delta_log.push_back(delta);
        if (delta <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    umdrl_universal_policy(res.q, grid, res.policy, opts.alpha, opts.parallel);
    for (int dom = 0; dom < D; ++dom)
        for (int s = 0; s < S; ++s) {
            int best_cell = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < C; ++c) {
                double obj = policy_backup(res.q, 0, dom, s, res.policy, c, opts.alpha);
                if (obj > best) {
                    best = obj;
                    best_cell = c;
                }
            }
            res.chi[static_cast<std::size_t>(dom) * S + s] = best_cell;
        }
    return res;
}

double scalarized_soft_value(const MultiDomainMDP& mdp, const PolicyTable& policy, const std::vector<double>& w,
                             double alpha) {
    auto v = value_at_initial(mdp, policy, alpha);
    double acc = 0.0;
    for (std::size_t d = 0; d < v.size(); ++d) acc += w[d] * v[d];
    return acc;
}

std::string HierarchyReport::to_csv() const {
    std::ostringstream out;
    out << "cell,dr_full,dr_at_cell,cmdrl,emdrl,umdrl1,umdrl2\n";
    for (const auto& r : rows)
        out << r.cell << ',' << fmt_fixed8(r.dr_full) << ',' << fmt_fixed8(r.dr_at_cell) << ','
            << fmt_fixed8(r.cmdrl) << ',' << fmt_fixed8(r.emdrl) << ',' << fmt_fixed8(r.umdrl1) << ','
            << fmt_fixed8(r.umdrl2) << '\n';
    return out.str();
}

HierarchyReport hierarchy_report(const MultiDomainMDP& mdp, const PreferenceGrid& grid, double alpha, double tol) {
    SolveOptions opts;
    opts.alpha = alpha;
    opts.tol = tol;
    HierarchyReport report;
    report.alpha = alpha;

    auto dr_full = solve_dr(mdp, Preference::uniform(mdp.n_domains()), opts);
    auto cmdrl = solve_cmdrl(mdp, grid, opts);
    auto emdrl = solve_emdrl(mdp, grid, opts);
    auto u1 = solve_umdrl_v1(mdp, grid, opts);
    auto u2 = solve_umdrl_v2(mdp, grid, opts);
    auto dr_policy = dr_full.policy.slice(0);

    // Values are plain (alpha = 0) scalarized returns of each solver's policy
    // slice, the currency the coverage-set scores use. Only the conditioned
    // solver is asserted against the full-support baseline: the envelope and
    // utopia variants carry no such guarantee (the envelope's anchor-following
    // cells can fall below the conditioned fixed point at mixed preferences,
    // matching the reference experiments) and are reported as-is.
    for (int c = 0; c < grid.n_cells(); ++c) {
        const auto& w = grid.weights(c);
        HierarchyRow row;
        row.cell = c;
        row.dr_full = scalarized_soft_value(mdp, dr_policy, w, 0.0);
        row.dr_at_cell = scalarized_soft_value(
            mdp, solve_dr(mdp, grid.cells[static_cast<std::size_t>(c)], opts).policy.slice(0), w, 0.0);
        row.cmdrl = scalarized_soft_value(mdp, cmdrl.policy.slice(c), w, 0.0);
        row.emdrl = scalarized_soft_value(mdp, emdrl.policy.slice(c), w, 0.0);
        row.umdrl1 = scalarized_soft_value(mdp, u1.policy.slice(c), w, 0.0);
        row.umdrl2 = scalarized_soft_value(mdp, u2.policy.slice(c), w, 0.0);
        for (auto [name, value] : {std::pair<const char*, double>{"dr_at_cell", row.dr_at_cell},
                                   {"cmdrl", row.cmdrl}}) {
            if (row.dr_full > value + report.assert_tol) {
                report.assertion_holds = false;
                report.violations.push_back("cell " + std::to_string(c) + ": dr_full exceeds " + name + " by " +
                                            fmt_fixed8(row.dr_full - value));
            }
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace mdrl
