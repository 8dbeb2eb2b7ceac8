#include "mdrl/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdrl::ref {

namespace {

std::vector<double> softmax_over_alpha(const std::vector<double>& q, double alpha) {
    double m = q[0];
    for (double v : q) m = std::max(m, v);
    std::vector<double> p(q.size());
    double z = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        p[i] = std::exp((q[i] - m) / alpha);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

std::vector<double> mix(const QTable& q, int cell, const std::vector<double>& w, int s) {
    std::vector<double> out(static_cast<std::size_t>(q.n_actions), 0.0);
    for (int dom = 0; dom < q.n_domains; ++dom)
        for (int a = 0; a < q.n_actions; ++a)
            out[static_cast<std::size_t>(a)] += w[static_cast<std::size_t>(dom)] * q.at(cell, dom, s, a);
    return out;
}

double entropy_backup(const QTable& q, int qcell, int dom, int s, const UniversalPolicy& pi, int pcell,
                      double alpha) {
    double acc = 0.0;
    for (int a = 0; a < q.n_actions; ++a) {
        double pa = pi.at(pcell, s, a);
        if (pa > 0.0) acc += pa * (q.at(qcell, dom, s, a) - alpha * std::log(pa));
    }
    return acc;
}

} // namespace

SolveResult solve_cmdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    const int C = grid.n_cells(), D = mdp.n_domains(), S = mdp.n_states, A = mdp.n_actions;
    SolveResult res;
    res.q = QTable::zeros(C, D, S, A, opts.alpha);
    res.policy = UniversalPolicy::uniform(C, S, A);
    res.converged = true;
    for (int c = 0; c < C; ++c) {
        QTable cur = QTable::zeros(1, D, S, A, opts.alpha);
        QTable nxt = cur;
        UniversalPolicy pi = UniversalPolicy::uniform(1, S, A);
        bool cell_done = false;
        int iters = 0;
        double delta = 0.0;
        for (int iter = 0; iter < opts.max_iter && !cell_done; ++iter) {
            for (int s = 0; s < S; ++s) {
                auto p = softmax_over_alpha(mix(cur, 0, grid.weights(c), s), opts.alpha);
                for (int a = 0; a < A; ++a) pi.at(0, s, a) = p[static_cast<std::size_t>(a)];
            }
            delta = 0.0;
            for (int dom = 0; dom < D; ++dom)
                for (int s = 0; s < S; ++s)
                    for (int a = 0; a < A; ++a) {
                        double acc = mdp.r(dom, s, a);
                        for (int s2 = 0; s2 < S; ++s2)
                            acc += mdp.gamma * mdp.p(dom, s, a, s2) * entropy_backup(cur, 0, dom, s2, pi, 0, opts.alpha);
                        nxt.at(0, dom, s, a) = acc;
                        delta = std::max(delta, std::abs(acc - cur.at(0, dom, s, a)));
                    }
            for (std::size_t i = 0; i < cur.q.size(); ++i) cur.q[i] += 0.5 * (nxt.q[i] - cur.q[i]);
            iters = iter + 1;
            if (delta <= opts.tol) cell_done = true;
        }
        res.converged = res.converged && cell_done;
        res.iterations = std::max(res.iterations, iters);
        res.final_delta = std::max(res.final_delta, delta);
        for (int s = 0; s < S; ++s) {
            auto p = softmax_over_alpha(mix(cur, 0, grid.weights(c), s), opts.alpha);
            for (int a = 0; a < A; ++a) res.policy.at(c, s, a) = p[static_cast<std::size_t>(a)];
        }
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) res.q.at(c, dom, s, a) = cur.at(0, dom, s, a);
    }
    return res;
}

SolveResult solve_emdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    const int C = grid.n_cells(), D = mdp.n_domains(), S = mdp.n_states, A = mdp.n_actions;
    SolveResult res;
    res.q = QTable::zeros(C, D, S, A, opts.alpha);
    res.policy = UniversalPolicy::uniform(C, S, A);
    res.chi.assign(static_cast<std::size_t>(C) * S, 0);
    QTable nxt = res.q;
    auto refresh_policy = [&]() {
        for (int c = 0; c < C; ++c)
            for (int s = 0; s < S; ++s) {
                auto p = softmax_over_alpha(mix(res.q, c, grid.weights(c), s), opts.alpha);
                for (int a = 0; a < A; ++a) res.policy.at(c, s, a) = p[static_cast<std::size_t>(a)];
            }
    };
    auto cell_objective = [&](int wcell, int s, int c2) {
        double obj = 0.0;
        for (int a = 0; a < A; ++a) {
            double pa = res.policy.at(c2, s, a);
            if (pa <= 0.0) continue;
            double qm = 0.0;
            for (int dom = 0; dom < D; ++dom)
                qm += grid.weights(wcell)[static_cast<std::size_t>(dom)] * res.q.at(c2, dom, s, a);
            obj += pa * (qm - opts.alpha * std::log(pa));
        }
        return obj;
    };
    auto refresh_chi = [&](bool sticky) {
        for (int c = 0; c < C; ++c)
            for (int s = 0; s < S; ++s) {
                const int prev = res.chi[static_cast<std::size_t>(c) * S + s];
                int best_cell = sticky ? prev : 0;
                double best = sticky ? cell_objective(c, s, prev) + 1e-9
                                     : -std::numeric_limits<double>::infinity();
                for (int c2 = 0; c2 < C; ++c2) {
                    if (sticky && c2 == prev) continue;
                    double obj = cell_objective(c, s, c2);
                    if (obj > best) {
                        best = obj;
                        best_cell = c2;
                    }
                }
                res.chi[static_cast<std::size_t>(c) * S + s] = best_cell;
            }
    };
    const int explore_sweeps = std::min(opts.max_iter / 2, 2000);
    int stable_sweeps = 0;
    std::vector<int> chi_before;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        refresh_policy();
        if (iter < explore_sweeps && stable_sweeps < 50) {
            chi_before = res.chi;
            refresh_chi(true);
            stable_sweeps = chi_before == res.chi ? stable_sweeps + 1 : 0;
        }
        double delta = 0.0;
        for (int c = 0; c < C; ++c)
            for (int dom = 0; dom < D; ++dom)
                for (int s = 0; s < S; ++s)
                    for (int a = 0; a < A; ++a) {
                        double acc = mdp.r(dom, s, a);
                        for (int s2 = 0; s2 < S; ++s2) {
                            int star = res.chi[static_cast<std::size_t>(c) * S + s2];
                            acc += mdp.gamma * mdp.p(dom, s, a, s2) *
                                   entropy_backup(res.q, c, dom, s2, res.policy, star, opts.alpha);
                        }
                        nxt.at(c, dom, s, a) = acc;
                        delta = std::max(delta, std::abs(acc - res.q.at(c, dom, s, a)));
                    }
        for (std::size_t i = 0; i < res.q.q.size(); ++i) res.q.q[i] += 0.5 * (nxt.q[i] - res.q.q[i]);
        res.iterations = iter + 1;
        res.final_delta = delta;
        if (delta <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    refresh_policy();
    refresh_chi(false);
    return res;
}

SolveResult solve_umdrl_v1(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts) {
    const int D = mdp.n_domains(), S = mdp.n_states, A = mdp.n_actions;
    SolveResult res;
    res.q = QTable::zeros(1, D, S, A, opts.alpha);
    QTable nxt = res.q;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double delta = 0.0;
        for (int dom = 0; dom < D; ++dom)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double acc = mdp.r(dom, s, a);
                    for (int s2 = 0; s2 < S; ++s2) {
                        std::vector<double> qrow(static_cast<std::size_t>(A));
                        for (int a2 = 0; a2 < A; ++a2) qrow[static_cast<std::size_t>(a2)] = res.q.at(0, dom, s2, a2);
                        auto p = softmax_over_alpha(qrow, opts.alpha);
                        double inner = 0.0;
                        for (int a2 = 0; a2 < A; ++a2)
                            if (p[static_cast<std::size_t>(a2)] > 0.0)
                                inner += p[static_cast<std::size_t>(a2)] *
                                         (qrow[static_cast<std::size_t>(a2)] -
                                          opts.alpha * std::log(p[static_cast<std::size_t>(a2)]));
                        acc += mdp.gamma * mdp.p(dom, s, a, s2) * inner;
                    }
                    nxt.at(0, dom, s, a) = acc;
                    delta = std::max(delta, std::abs(acc - res.q.at(0, dom, s, a)));
                }
        res.q.q = nxt.q;
        res.iterations = iter + 1;
        res.final_delta = delta;
        if (delta <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.policy = UniversalPolicy::uniform(grid.n_cells(), S, A);
    for (int c = 0; c < grid.n_cells(); ++c)
        for (int s = 0; s < S; ++s) {
            auto p = softmax_over_alpha(mix(res.q, 0, grid.weights(c), s), opts.alpha);
            for (int a = 0; a < A; ++a) res.policy.at(c, s, a) = p[static_cast<std::size_t>(a)];
        }
    return res;
}

CoverageSet compute_ccs(const std::vector<ValueVector>& values, const PreferenceGrid& grid) {
    if (values.empty()) throw std::invalid_argument("ref::compute_ccs: empty input");
    const std::size_t n = values.size();
    std::vector<char> dominated(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool geq = true, gt = false;
            for (std::size_t k = 0; k < values[i].size(); ++k) {
                if (values[j][k] < values[i][k]) geq = false;
                if (values[j][k] > values[i][k]) gt = true;
            }
            if (geq && gt) dominated[i] = 1;
        }
    std::vector<int> witness(n, -1);
    for (int c = 0; c < grid.n_cells(); ++c) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double u = 0.0;
            for (std::size_t k = 0; k < values[i].size(); ++k) u += grid.weights(c)[k] * values[i][k];
            best = std::max(best, u);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (dominated[i]) continue;
            double u = 0.0;
            for (std::size_t k = 0; k < values[i].size(); ++k) u += grid.weights(c)[k] * values[i][k];
            if (u == best && witness[i] < 0) witness[i] = c;
        }
    }
    CoverageSet out;
    out.kind = CoverageSet::Kind::CCS;
    for (std::size_t i = 0; i < n; ++i)
        if (witness[i] >= 0) out.entries.push_back({static_cast<int>(i), values[i], witness[i]});
    return out;
}

} // namespace mdrl::ref
