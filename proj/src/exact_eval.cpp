#include "mdrl/exact_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace mdrl {

PolicyTable PolicyTable::uniform(int n_states, int n_actions) {
    PolicyTable t;
    t.n_states = n_states;
    t.n_actions = n_actions;
    t.p.assign(static_cast<std::size_t>(n_states) * n_actions, 1.0 / n_actions);
    return t;
}

PolicyTable PolicyTable::deterministic(const std::vector<int>& actions, int n_actions) {
    PolicyTable t;
    t.n_states = static_cast<int>(actions.size());
    t.n_actions = n_actions;
    t.p.assign(static_cast<std::size_t>(t.n_states) * n_actions, 0.0);
    for (int s = 0; s < t.n_states; ++s) t.at(s, actions[static_cast<std::size_t>(s)]) = 1.0;
    return t;
}

UniversalPolicy UniversalPolicy::uniform(int n_cells, int n_states, int n_actions) {
    UniversalPolicy u;
    u.n_cells = n_cells;
    u.n_states = n_states;
    u.n_actions = n_actions;
    u.p.assign(static_cast<std::size_t>(n_cells) * n_states * n_actions, 1.0 / n_actions);
    return u;
}

PolicyTable UniversalPolicy::slice(int cell) const {
    PolicyTable t;
    t.n_states = n_states;
    t.n_actions = n_actions;
    t.p.assign(p.begin() + static_cast<std::ptrdiff_t>(cell) * n_states * n_actions,
               p.begin() + static_cast<std::ptrdiff_t>(cell + 1) * n_states * n_actions);
    return t;
}

std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) throw std::runtime_error("solve_linear_system: singular system (internal error)");
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(pivot) * n + c], a[static_cast<std::size_t>(col) * n + c]);
            std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) acc -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

std::vector<ValueVector> policy_value_exact(const MultiDomainMDP& mdp, const PolicyTable& policy, double alpha) {
    if (policy.n_states != mdp.n_states || policy.n_actions != mdp.n_actions)
        throw std::invalid_argument("policy_value_exact: policy shape mismatch");
    if (alpha < 0.0) throw std::invalid_argument("policy_value_exact: alpha must be nonnegative");
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    std::vector<ValueVector> values(static_cast<std::size_t>(S), ValueVector(static_cast<std::size_t>(mdp.n_domains()), 0.0));

    for (int dom = 0; dom < mdp.n_domains(); ++dom) {
        // Assemble (I - gamma P_pi) and the entropy-augmented policy reward.
        std::vector<double> mat(static_cast<std::size_t>(S) * S, 0.0);
        std::vector<double> rhs(static_cast<std::size_t>(S), 0.0);
        for (int s = 0; s < S; ++s) {
            mat[static_cast<std::size_t>(s) * S + s] = 1.0;
            for (int a = 0; a < A; ++a) {
                const double pa = policy.at(s, a);
                if (pa <= 0.0) continue;
                rhs[static_cast<std::size_t>(s)] += pa * (mdp.r(dom, s, a) - alpha * std::log(pa));
                auto row = mdp.row(dom, s, a);
                for (int s2 = 0; s2 < S; ++s2)
                    mat[static_cast<std::size_t>(s) * S + s2] -= mdp.gamma * pa * row[static_cast<std::size_t>(s2)];
            }
        }
        auto v = solve_linear_system(std::move(mat), std::move(rhs), S);
        for (int s = 0; s < S; ++s) values[static_cast<std::size_t>(s)][static_cast<std::size_t>(dom)] = v[static_cast<std::size_t>(s)];
    }
    return values;
}

ValueVector value_at_initial(const MultiDomainMDP& mdp, const PolicyTable& policy, double alpha) {
    auto per_state = policy_value_exact(mdp, policy, alpha);
    ValueVector out(static_cast<std::size_t>(mdp.n_domains()), 0.0);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int d = 0; d < mdp.n_domains(); ++d)
            out[static_cast<std::size_t>(d)] += mdp.initial_dist[static_cast<std::size_t>(s)] * per_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
    return out;
}

} // namespace mdrl
