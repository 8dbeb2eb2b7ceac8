#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "mdrl/envs.hpp"
#include "mdrl/utility.hpp"
#include "oracles.hpp"

using namespace mdrl;

namespace {
std::vector<int> ids(const CoverageSet& set) {
    std::vector<int> out;
    for (const auto& e : set.entries) out.push_back(e.policy_id);
    return out;
}
} // namespace

TEST_CASE("linear utility arithmetic") {
    auto w = Preference::discrete({0.5, 0.5});
    CHECK(linear_utility({5.0, 2.0}, w) == 3.5);
    CHECK(linear_utility({3.0, 3.0}, w) == 3.0);
    CHECK(linear_utility({7.25, -1.0}, Preference::delta(0, 2)) == 7.25);
    CHECK(linear_utility({7.25, -1.0}, Preference::delta(1, 2)) == -1.0);
    CHECK_THROWS(linear_utility({1.0}, w));
}

TEST_CASE("pareto dominance") {
    CHECK(pareto_dominates({5.0, 4.0}, {3.0, 3.0}));
    CHECK_FALSE(pareto_dominates({5.0, 2.0}, {3.0, 3.0})); // incomparable
    CHECK_FALSE(pareto_dominates({3.0, 3.0}, {5.0, 2.0}));
    CHECK_FALSE(pareto_dominates({3.0, 3.0}, {3.0, 3.0})); // no strict improvement
    CHECK(pareto_dominates({3.0, 4.0}, {3.0, 3.0}));       // weak convention
}

TEST_CASE("compute_pcs keeps exactly the non-dominated subset") {
    std::vector<ValueVector> vals = {{0.0, 1.0}, {1.0, 0.0}, {0.4, 0.4}};
    CHECK(ids(compute_pcs(vals)) == std::vector<int>{0, 1, 2});
    CHECK(ids(compute_pcs({{1.0, 1.0}, {0.0, 0.0}})) == std::vector<int>{0});
    CHECK_THROWS(compute_pcs({}));

    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ValueVector> random_vals;
        for (int i = 0; i < 50; ++i) random_vals.push_back({rng.next_double(), rng.next_double(), rng.next_double()});
        CHECK(ids(compute_pcs(random_vals)) == oracles::pairwise_pcs_oracle(random_vals));
        // idempotent
        std::vector<ValueVector> once;
        for (const auto& e : compute_pcs(random_vals).entries) once.push_back(e.value);
        CHECK(compute_pcs(once).entries.size() == once.size());
    }
}

TEST_CASE("compute_ccs drops the concave point and keeps a witness") {
    auto grid = PreferenceGrid::simplex(2, 10);
    std::vector<ValueVector> vals = {{0.0, 1.0}, {1.0, 0.0}, {0.4, 0.4}};
    auto ccs = compute_ccs(vals, grid);
    CHECK(ids(ccs) == std::vector<int>{0, 1});
    for (const auto& e : ccs.entries) CHECK(e.witness_cell >= 0);
    // singleton input is its own coverage set
    CHECK(ids(compute_ccs({{2.0, 2.0}}, grid)) == std::vector<int>{0});
}

TEST_CASE("compute_ccs matches the hull oracle on random two-domain sets") {
    auto grid = PreferenceGrid::simplex(2, 20000);
    Rng rng(555);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ValueVector> vals;
        for (int i = 0; i < 50; ++i) vals.push_back({rng.next_double(), rng.next_double()});
        CHECK(ids(compute_ccs(vals, grid)) == oracles::upper_hull_ccs_oracle_2d(vals));
    }
}

TEST_CASE("CCS is a subset of PCS and invariant under duplication") {
    auto grid = PreferenceGrid::simplex(2, 50);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ValueVector> vals;
        for (int i = 0; i < 30; ++i) vals.push_back({rng.next_double(), rng.next_double()});
        auto pcs_ids = ids(compute_pcs(vals));
        auto ccs = compute_ccs(vals, grid);
        for (const auto& e : ccs.entries)
            CHECK(std::find(pcs_ids.begin(), pcs_ids.end(), e.policy_id) != pcs_ids.end());

        std::set<ValueVector> ccs_values;
        for (const auto& e : ccs.entries) ccs_values.insert(e.value);
        auto doubled = vals;
        doubled.insert(doubled.end(), vals.begin(), vals.end());
        std::set<ValueVector> doubled_values;
        for (const auto& e : compute_ccs(doubled, grid).entries) doubled_values.insert(e.value);
        CHECK(ccs_values == doubled_values);
    }
}

TEST_CASE("optimal scalarized value, ties, and argmax invariance") {
    std::vector<ValueVector> vals = {{5.0, 2.0}, {3.0, 3.0}};
    auto [best, arg] = optimal_scalarized_value(vals, Preference::discrete({0.5, 0.5}));
    CHECK(best == 3.5);
    CHECK(arg == 0);
    auto [b2, a2] = optimal_scalarized_value({{0.0, 1.0}, {1.0, 0.0}}, Preference::delta(0, 2));
    CHECK(b2 == 1.0);
    CHECK(a2 == 1);
    // ties break to the lowest index
    auto [b3, a3] = optimal_scalarized_value({{1.0, 0.0}, {0.0, 1.0}}, Preference::discrete({0.5, 0.5}));
    CHECK(b3 == 0.5);
    CHECK(a3 == 0);
    // winner unchanged under positive rescaling of the weights
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ValueVector> pts;
        for (int i = 0; i < 12; ++i) pts.push_back({rng.next_double(), rng.next_double()});
        const double w0 = rng.next_double();
        auto base = optimal_scalarized_value(pts, Preference::discrete({w0, 1.0 - w0}));
        const double c = 0.1 + 5.0 * rng.next_double();
        auto scaled = optimal_scalarized_value(pts, Preference::discrete({c * w0, c * (1.0 - w0)}));
        CHECK(base.second == scaled.second);
    }
}

TEST_CASE("optimal scalarized value is convex along a preference line") {
    Rng rng(77);
    std::vector<ValueVector> vals;
    for (int i = 0; i < 25; ++i) vals.push_back({rng.next_double(), rng.next_double()});
    std::vector<double> curve;
    const int n = 801;
    for (int i = 0; i < n; ++i) {
        const double w = static_cast<double>(i) / (n - 1);
        curve.push_back(optimal_scalarized_value(vals, Preference::discrete({w, 1.0 - w})).first);
    }
    for (int i = 1; i + 1 < n; ++i) CHECK(curve[i + 1] - 2.0 * curve[i] + curve[i - 1] >= -1e-9);
}

TEST_CASE("policy enumeration counts and cap") {
    Rng rng(5);
    auto one_state = oracles::random_mdp(1, 3, 2, 0.9, rng);
    CHECK(enumerate_policies_oracle(one_state).size() == 3);
    auto two_state = oracles::random_mdp(2, 2, 2, 0.9, rng);
    CHECK(enumerate_policies_oracle(two_state).size() == 4);
    auto big = oracles::random_mdp(6, 3, 2, 0.9, rng);
    CHECK_THROWS(enumerate_policies_oracle(big, 100));
}

TEST_CASE("enumerated values are exact policy evaluations") {
    auto mdp = build_two_domain_chain();
    auto policies = enumerate_policies_oracle(mdp);
    CHECK(policies.size() == 32);
    for (const auto& p : {policies[0], policies[7], policies[31]}) {
        auto direct = value_at_initial(mdp, PolicyTable::deterministic(p.actions, 2), 0.0);
        for (int d = 0; d < 2; ++d) CHECK(p.value[d] == doctest::Approx(direct[d]).epsilon(1e-12));
    }
}
