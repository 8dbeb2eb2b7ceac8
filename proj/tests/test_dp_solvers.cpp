#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdrl/dp_solvers.hpp"
#include "mdrl/envs.hpp"
#include "mdrl/utility.hpp"
#include "oracles.hpp"

using namespace mdrl;

namespace {

// Soft Q-value of a fixed policy in one domain: r + gamma P V_soft, from the
// exact per-state evaluation.
std::vector<double> soft_q_of_policy(const MultiDomainMDP& mdp, int dom, const PolicyTable& policy, double alpha) {
    auto v = policy_value_exact(mdp, policy, alpha);
    std::vector<double> q(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            double acc = mdp.r(dom, s, a);
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                acc += mdp.gamma * mdp.p(dom, s, a, s2) * v[static_cast<std::size_t>(s2)][static_cast<std::size_t>(dom)];
            q[static_cast<std::size_t>(s) * mdp.n_actions + a] = acc;
        }
    return q;
}

MultiDomainMDP single_domain_chain() { return build_two_domain_chain(5, 0.2, 0.2); }

PreferenceGrid one_cell_grid(std::vector<double> w) {
    PreferenceGrid grid;
    grid.n_domains = static_cast<int>(w.size());
    grid.resolution = 1;
    grid.cells.push_back(Preference::discrete(std::move(w)));
    return grid;
}

} // namespace

TEST_CASE("soft_policy arithmetic") {
    auto p = soft_policy(std::vector<double>{1.0, 1.0}, 1.0);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
    auto q = soft_policy(std::vector<double>{1.0, 0.0}, 1.0);
    CHECK(q[0] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
    auto greedy = soft_policy(std::vector<double>{1.0, 0.0}, 1e-6);
    CHECK(std::abs(greedy[0] - 1.0) <= 1e-9);
    CHECK(std::abs(greedy[1]) <= 1e-9);
    CHECK_THROWS(soft_policy(std::vector<double>{1.0, std::nan("")}, 1.0));
    CHECK_THROWS(soft_policy(std::vector<double>{1.0}, 0.0));
}

TEST_CASE("soft_policy is invariant under constant shifts") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> qbar = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const double alpha = 0.01 + rng.next_double();
        auto base = soft_policy(qbar, alpha);
        const double shift = rng.uniform(-100, 100);
        for (auto& v : qbar) v += shift;
        auto shifted = soft_policy(qbar, alpha);
        for (std::size_t a = 0; a < base.size(); ++a) CHECK(base[a] == doctest::Approx(shifted[a]).epsilon(1e-10));
    }
}

TEST_CASE("soft_value arithmetic and bounds") {
    CHECK(soft_value(std::vector<double>{1.0, 1.0}, 1.0) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-14));
    CHECK(soft_value(std::vector<double>{3.25}, 0.7) == doctest::Approx(3.25).epsilon(1e-14));
    for (double alpha : {0.5, 0.05, 0.001}) {
        const double v = soft_value(std::vector<double>{2.0, 1.0}, alpha);
        CHECK(v >= 2.0);
        CHECK(v <= 2.0 + alpha * std::log(2.0) + 1e-15);
    }
}

TEST_CASE("fixed-policy backups contract at rate gamma") {
    auto mdp = build_two_domain_chain();
    auto policy = PolicyTable::uniform(5, 2);
    const double alpha = 0.05;
    // iterate V <- r_pi + gamma P_pi V and track sup-norm deltas
    std::vector<double> v(5, 0.0), prev_delta;
    for (int iter = 0; iter < 60; ++iter) {
        std::vector<double> next(5, 0.0);
        double delta = 0.0;
        for (int s = 0; s < 5; ++s) {
            double acc = 0.0;
            for (int a = 0; a < 2; ++a) {
                const double pa = policy.at(s, a);
                double q = mdp.r(0, s, a) - alpha * std::log(pa);
                for (int s2 = 0; s2 < 5; ++s2) q += mdp.gamma * mdp.p(0, s, a, s2) * v[static_cast<std::size_t>(s2)];
                acc += pa * q;
            }
            next[static_cast<std::size_t>(s)] = acc;
            delta = std::max(delta, std::abs(acc - v[static_cast<std::size_t>(s)]));
        }
        v = next;
        prev_delta.push_back(delta);
    }
    for (std::size_t k = 1; k < prev_delta.size(); ++k)
        CHECK(prev_delta[k] <= mdp.gamma * prev_delta[k - 1] * (1.0 + 1e-12) + 1e-300);
}

TEST_CASE("solver sweep deltas decay to tolerance") {
    auto res = solve_dr(build_two_domain_chain(), Preference::uniform(2), {});
    CHECK(res.converged);
    REQUIRE_FALSE(res.delta_log.empty());
    CHECK(res.delta_log.back() <= 1e-8);
    // tail decay is geometric-ish: every 20 sweeps the delta shrinks
    for (std::size_t k = 20; k < res.delta_log.size(); k += 20)
        CHECK(res.delta_log[k] < res.delta_log[k - 20]);
}

TEST_CASE("solve_dr on a single domain satisfies the soft optimality equations") {
    auto mdp = single_domain_chain();
    // two identical domains: the mixture collapses to one domain
    auto res = solve_dr(mdp, Preference::uniform(2), {});
    REQUIRE(res.converged);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 2; ++a) {
            double rhs = mdp.r(0, s, a);
            for (int s2 = 0; s2 < 5; ++s2) {
                std::vector<double> next_q = {res.q.at(0, 0, s2, 0), res.q.at(0, 0, s2, 1)};
                rhs += mdp.gamma * mdp.p(0, s, a, s2) * soft_value(next_q, res.q.alpha);
            }
            CHECK(res.q.at(0, 0, s, a) == doctest::Approx(rhs).epsilon(1e-6));
        }
}

TEST_CASE("solve_dr values sit between and near the oracle optima") {
    auto mdp = build_two_domain_chain();
    auto policies = enumerate_policies_oracle(mdp);
    std::vector<ValueVector> values;
    for (const auto& p : policies) values.push_back(p.value);
    SolveOptions opts;
    opts.tol = 1e-10;

    // delta preferences: per-domain value within alpha ln|A| / (1 - gamma) of
    // the oracle's best deterministic value
    const double slack = opts.alpha * std::log(2.0) / (1.0 - mdp.gamma);
    for (int d = 0; d < 2; ++d) {
        auto res = solve_dr(mdp, Preference::delta(d, 2), opts);
        REQUIRE(res.converged);
        auto v = value_at_initial(mdp, res.policy.slice(0), 0.0);
        auto [best, arg] = optimal_scalarized_value(values, Preference::delta(d, 2));
        CHECK(v[d] >= best - slack - 1e-6);
        CHECK(v[d] <= best + 1e-9);
    }
    // balanced preference: scalarized value tracks the oracle's best mixture
    // value and sits between the two delta optima on this environment
    auto res = solve_dr(mdp, Preference::discrete({0.5, 0.5}), opts);
    REQUIRE(res.converged);
    auto v = value_at_initial(mdp, res.policy.slice(0), 0.0);
    const double scalar = 0.5 * (v[0] + v[1]);
    auto [best_mix, am] = optimal_scalarized_value(values, Preference::discrete({0.5, 0.5}));
    CHECK(scalar >= best_mix - slack - 1e-6);
    CHECK(scalar <= best_mix + 1e-9);
    auto [best0, a0] = optimal_scalarized_value(values, Preference::delta(0, 2));
    auto [best1, a1] = optimal_scalarized_value(values, Preference::delta(1, 2));
    CHECK(scalar <= std::max(best0, best1));
    // On this environment the domains demand opposite policies, so the best
    // mixture value sits well below both delta optima.
    CHECK(best_mix < std::min(best0, best1));
}

TEST_CASE("solve_cmdrl: degenerate grid equals solve_dr and equal cells agree") {
    auto mdp = build_two_domain_chain();
    auto grid = one_cell_grid({0.5, 0.5});
    auto cell = solve_cmdrl(mdp, grid, {});
    auto dr = solve_dr(mdp, Preference::discrete({0.5, 0.5}), {});
    for (std::size_t i = 0; i < cell.q.q.size(); ++i) CHECK(cell.q.q[i] == doctest::Approx(dr.q.q[i]).epsilon(1e-12));

    PreferenceGrid twin = one_cell_grid({0.3, 0.7});
    twin.cells.push_back(Preference::discrete({0.3, 0.7}));
    auto res = solve_cmdrl(mdp, twin, {});
    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 5; ++s)
            for (int a = 0; a < 2; ++a) CHECK(res.q.at(0, d, s, a) == res.q.at(1, d, s, a));
}

TEST_CASE("solve_cmdrl near-greedy delta cells recover oracle-optimal actions") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.alpha = 1e-6;
    opts.tol = 1e-12;
    opts.max_iter = 20000;
    auto res = solve_cmdrl(mdp, grid, opts);
    // Near-greedy mixed-preference cells may sit on a bounded policy cycle;
    // the delta cells always contract, and those are the ones checked here.
    for (int d = 0; d < 2; ++d) {
        auto qstar = oracles::hard_optimal_q(mdp, d);
        const int cell = grid.one_hot_cell(d);
        REQUIRE(res.cell_converged[static_cast<std::size_t>(cell)] == 1);
        for (int s = 0; s < mdp.n_states; ++s) {
            int greedy = 0;
            for (int a = 1; a < mdp.n_actions; ++a)
                if (res.policy.at(cell, s, a) > res.policy.at(cell, s, greedy)) greedy = a;
            double best = qstar[static_cast<std::size_t>(s) * 2];
            for (int a = 1; a < 2; ++a) best = std::max(best, qstar[static_cast<std::size_t>(s) * 2 + a]);
            CHECK(qstar[static_cast<std::size_t>(s) * 2 + greedy] >= best - 1e-9);
        }
    }
}

TEST_CASE("envelope_filter on hand-built tables") {
    // two states, two actions, one domain, two cells; cell 1's policy is
    // strictly better under cell 0's weighting
    PreferenceGrid grid;
    grid.n_domains = 1;
    grid.resolution = 1;
    grid.cells.push_back(Preference::discrete({1.0}));
    grid.cells.push_back(Preference::discrete({1.0}));
    QTable q = QTable::zeros(2, 1, 2, 2, 0.05);
    UniversalPolicy pi = UniversalPolicy::uniform(2, 2, 2);
    // cell 0 puts mass on the poor action, cell 1 on the good one
    q.at(0, 0, 0, 0) = 0.0;
    q.at(0, 0, 0, 1) = 1.0;
    q.at(1, 0, 0, 0) = 0.0;
    q.at(1, 0, 0, 1) = 1.0;
    pi.at(0, 0, 0) = 0.9;
    pi.at(0, 0, 1) = 0.1;
    pi.at(1, 0, 0) = 0.1;
    pi.at(1, 0, 1) = 0.9;
    CHECK(envelope_filter(q, pi, grid, 0, 0) == 1);
    // a single-cell grid returns that cell
    auto single = one_cell_grid({1.0});
    QTable q1 = QTable::zeros(1, 1, 2, 2, 0.05);
    CHECK(envelope_filter(q1, UniversalPolicy::uniform(1, 2, 2), single, 0, 0) == 0);
}

TEST_CASE("solve_emdrl: degenerate grid reduces to solve_dr") {
    auto mdp = build_two_domain_chain();
    auto grid = one_cell_grid({0.5, 0.5});
    auto env = solve_emdrl(mdp, grid, {});
    auto dr = solve_dr(mdp, Preference::discrete({0.5, 0.5}), {});
    REQUIRE(env.converged);
    for (std::size_t i = 0; i < env.q.q.size(); ++i) CHECK(env.q.q[i] == doctest::Approx(dr.q.q[i]).epsilon(1e-7));
}

TEST_CASE("solve_emdrl: filter post-conditions hold exhaustively at the fixed point") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.tol = 1e-12;
    auto res = solve_emdrl(mdp, grid, opts);
    REQUIRE(res.converged);
    auto objective = [&](int s, int wcell, int cell) {
        double obj = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double pa = res.policy.at(cell, s, a);
            if (pa <= 0.0) continue;
            double qm = 0.0;
            for (int d = 0; d < 2; ++d) qm += grid.weights(wcell)[static_cast<std::size_t>(d)] * res.q.at(cell, d, s, a);
            obj += pa * (qm - res.q.alpha * std::log(pa));
        }
        return obj;
    };
    for (int w = 0; w < grid.n_cells(); ++w)
        for (int s = 0; s < mdp.n_states; ++s) {
            const int star = res.chi[static_cast<std::size_t>(w) * mdp.n_states + s];
            const double at_star = objective(s, w, star);
            for (int c = 0; c < grid.n_cells(); ++c) CHECK(at_star >= objective(s, w, c));
            CHECK(at_star >= objective(s, w, w));
        }
}

TEST_CASE("solve_emdrl against solve_cmdrl on the chain") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.tol = 1e-12;
    auto env = solve_emdrl(mdp, grid, opts);
    auto cond = solve_cmdrl(mdp, grid, opts);
    REQUIRE(env.converged);
    // At the one-hot cells the filter is a self-loop and the two fixed points
    // coincide. Mid-preference cells follow anchor policies and their ordering
    // against the conditioned solver is environment-dependent (the reference
    // experiments show either direction), so it is reported, not asserted.
    for (int d = 0; d < 2; ++d) {
        const int c = grid.one_hot_cell(d);
        CHECK(env.chi[static_cast<std::size_t>(c) * mdp.n_states + 0] == c);
        const double ve = scalarized_soft_value(mdp, env.policy.slice(c), grid.weights(c), opts.alpha);
        const double vc = scalarized_soft_value(mdp, cond.policy.slice(c), grid.weights(c), opts.alpha);
        CHECK(ve == doctest::Approx(vc).epsilon(1e-9));
    }
}

TEST_CASE("solve_umdrl_v1: per-domain soft optimality and delta-policy match") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.tol = 1e-12;
    auto res = solve_umdrl_v1(mdp, grid, opts);
    REQUIRE(res.converged);
    // Bellman residual of per-domain soft value iteration
    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 5; ++s)
            for (int a = 0; a < 2; ++a) {
                double rhs = mdp.r(d, s, a);
                for (int s2 = 0; s2 < 5; ++s2) {
                    std::vector<double> nq = {res.q.at(0, d, s2, 0), res.q.at(0, d, s2, 1)};
                    rhs += mdp.gamma * mdp.p(d, s, a, s2) * soft_value(nq, opts.alpha);
                }
                CHECK(res.q.at(0, d, s, a) == doctest::Approx(rhs).epsilon(1e-8));
            }
    // delta-preference slices equal the single-domain DR policies
    for (int d = 0; d < 2; ++d) {
        auto dr = solve_dr(mdp, Preference::delta(d, 2), opts);
        const int cell = grid.one_hot_cell(d);
        for (int s = 0; s < 5; ++s)
            for (int a = 0; a < 2; ++a)
                CHECK(res.policy.at(cell, s, a) == doctest::Approx(dr.policy.at(0, s, a)).epsilon(1e-7));
    }
}

TEST_CASE("utopia bound holds for both utopia solvers") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.tol = 1e-12;
    for (bool v2 : {false, true}) {
        auto res = v2 ? solve_umdrl_v2(mdp, grid, opts) : solve_umdrl_v1(mdp, grid, opts);
        REQUIRE(res.converged);
        for (int c = 0; c < grid.n_cells(); ++c) {
            const auto& w = grid.weights(c);
            std::vector<std::vector<double>> q_pi(2);
            for (int d = 0; d < 2; ++d) q_pi[static_cast<std::size_t>(d)] = soft_q_of_policy(mdp, d, res.policy.slice(c), opts.alpha);
            for (int s = 0; s < 5; ++s)
                for (int a = 0; a < 2; ++a) {
                    double lhs = 0.0, rhs = 0.0;
                    for (int d = 0; d < 2; ++d) {
                        lhs += w[static_cast<std::size_t>(d)] * q_pi[static_cast<std::size_t>(d)][static_cast<std::size_t>(s) * 2 + a];
                        rhs += w[static_cast<std::size_t>(d)] * res.q.at(0, d, s, a);
                    }
                    CHECK(lhs <= rhs + 1e-9);
                }
        }
    }
}

TEST_CASE("solve_umdrl_v2: chi picks cells at least as good as the delta cell") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    SolveOptions opts;
    opts.tol = 1e-12;
    auto res = solve_umdrl_v2(mdp, grid, opts);
    REQUIRE(res.converged);
    auto objective = [&](int dom, int s, int cell) {
        double obj = 0.0;
        for (int a = 0; a < 2; ++a) {
            const double pa = res.policy.at(cell, s, a);
            if (pa <= 0.0) continue;
            obj += pa * (res.q.at(0, dom, s, a) - opts.alpha * std::log(pa));
        }
        return obj;
    };
    for (int d = 0; d < 2; ++d)
        for (int s = 0; s < 5; ++s) {
            const int star = res.chi[static_cast<std::size_t>(d) * 5 + s];
            CHECK(objective(d, s, star) >= objective(d, s, grid.one_hot_cell(d)) - 1e-9);
        }
    // values match or beat v1 after convergence
    auto v1 = solve_umdrl_v1(mdp, grid, opts);
    for (int c = 0; c < grid.n_cells(); ++c) {
        auto v2_val = value_at_initial(mdp, res.policy.slice(c), opts.alpha);
        auto v1_val = value_at_initial(mdp, v1.policy.slice(c), opts.alpha);
        for (int d = 0; d < 2; ++d) CHECK(v2_val[d] >= v1_val[d] - 1e-6);
    }
    // single-cell grid on a single-domain problem: chi is constant
    MultiDomainMDP one = build_two_domain_chain();
    one.domains.pop_back();
    auto single = one_cell_grid({1.0});
    auto res_one = solve_umdrl_v2(one, single, opts);
    for (int x : res_one.chi) CHECK(x == 0);
}

TEST_CASE("hierarchy report: assertion holds on the chain, collapses on one domain") {
    auto mdp = build_two_domain_chain();
    auto grid = PreferenceGrid::simplex(2, 10);
    auto report = hierarchy_report(mdp, grid, 0.05, 1e-10);
    CHECK(report.assertion_holds);
    CHECK(report.rows.size() == static_cast<std::size_t>(grid.n_cells()));
    // deterministic
    auto again = hierarchy_report(mdp, grid, 0.05, 1e-10);
    CHECK(report.to_csv() == again.to_csv());

    auto same = single_domain_chain(); // identical domains: hierarchy collapses
    auto collapsed = hierarchy_report(same, grid, 0.05, 1e-10);
    for (const auto& row : collapsed.rows) {
        CHECK(row.dr_full == doctest::Approx(row.cmdrl).epsilon(1e-6));
        CHECK(row.cmdrl == doctest::Approx(row.emdrl).epsilon(1e-6));
        CHECK(row.emdrl == doctest::Approx(row.umdrl1).epsilon(1e-6));
        CHECK(row.umdrl1 == doctest::Approx(row.umdrl2).epsilon(1e-6));
    }
}

TEST_CASE("random mdp sweep: conditioned solver tracks the enumeration oracle") {
    Rng rng(2025);
    SolveOptions opts;
    opts.tol = 1e-10;
    const double slack = opts.alpha * std::log(3.0) / (1.0 - 0.9) + 1e-6;
    for (int trial = 0; trial < 5; ++trial) {
        auto mdp = oracles::random_mdp(4, 3, 2, 0.9, rng);
        auto grid = PreferenceGrid::simplex(2, 4);
        auto res = solve_cmdrl(mdp, grid, opts);
        REQUIRE(res.converged);
        auto policies = enumerate_policies_oracle(mdp);
        std::vector<ValueVector> values;
        for (const auto& p : policies) values.push_back(p.value);
        for (int c = 0; c < grid.n_cells(); ++c) {
            auto v = value_at_initial(mdp, res.policy.slice(c), 0.0);
            double scalar = 0.0;
            for (int d = 0; d < 2; ++d) scalar += grid.weights(c)[static_cast<std::size_t>(d)] * v[static_cast<std::size_t>(d)];
            auto [best, arg] = optimal_scalarized_value(values, grid.cells[static_cast<std::size_t>(c)]);
            CHECK(scalar >= best - slack);
        }
    }
}
