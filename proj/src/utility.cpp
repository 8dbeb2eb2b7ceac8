#include "mdrl/utility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mdrl/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdrl {

double linear_utility(const ValueVector& v, const Preference& pref) {
    if (pref.is_box()) throw std::invalid_argument("linear_utility: preference must be discrete");
    if (pref.weights.size() != v.size()) throw std::invalid_argument("linear_utility: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += pref.weights[i] * v[i];
    return acc;
}

bool pareto_dominates(const ValueVector& a, const ValueVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pareto_dominates: length mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

namespace {

std::vector<char> pcs_mask(const std::vector<ValueVector>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<char> keep(static_cast<std::size_t>(n), 1);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (pareto_dominates(values[static_cast<std::size_t>(j)], values[static_cast<std::size_t>(i)])) {
                keep[static_cast<std::size_t>(i)] = 0;
                break;
            }
        }
    }
    return keep;
}

} // namespace

CoverageSet compute_pcs(const std::vector<ValueVector>& values) {
    if (values.empty()) throw std::invalid_argument("compute_pcs: empty input");
    auto keep = pcs_mask(values);
    CoverageSet out;
    out.kind = CoverageSet::Kind::PCS;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (keep[i]) out.entries.push_back({static_cast<int>(i), values[i], -1});
    return out;
}

CoverageSet compute_ccs(const std::vector<ValueVector>& values, const PreferenceGrid& grid) {
    if (values.empty()) throw std::invalid_argument("compute_ccs: empty input");
    const int n = static_cast<int>(values.size());
    auto keep = pcs_mask(values);
    std::vector<int> witness(static_cast<std::size_t>(n), -1);
    const int n_cells = grid.n_cells();
    // Per cell, the scalarized maximum over all inputs equals the maximum over
    // the PCS, so dominated entries can never be marked.
    std::vector<std::vector<int>> winners(static_cast<std::size_t>(n_cells));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_cells; ++c) {
        const auto& w = grid.weights(c);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double u = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) u += w[k] * values[static_cast<std::size_t>(i)][k];
            if (u > best) best = u;
        }
        for (int i = 0; i < n; ++i) {
            if (!keep[static_cast<std::size_t>(i)]) continue;
            double u = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) u += w[k] * values[static_cast<std::size_t>(i)][k];
            if (u == best) winners[static_cast<std::size_t>(c)].push_back(i);
        }
    }
    for (int c = 0; c < n_cells; ++c)
        for (int i : winners[static_cast<std::size_t>(c)])
            if (witness[static_cast<std::size_t>(i)] < 0) witness[static_cast<std::size_t>(i)] = c;

    CoverageSet out;
    out.kind = CoverageSet::Kind::CCS;
    for (int i = 0; i < n; ++i)
        if (witness[static_cast<std::size_t>(i)] >= 0)
            out.entries.push_back({i, values[static_cast<std::size_t>(i)], witness[static_cast<std::size_t>(i)]});
    return out;
}

std::pair<double, int> optimal_scalarized_value(const std::vector<ValueVector>& values, const Preference& pref) {
    if (values.empty()) throw std::invalid_argument("optimal_scalarized_value: empty input");
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double u = linear_utility(values[i], pref);
        if (u > best) {
            best = u;
            arg = static_cast<int>(i);
        }
    }
    return {best, arg};
}

std::vector<EnumeratedPolicy> enumerate_policies_oracle(const MultiDomainMDP& mdp, std::int64_t cap) {
    std::int64_t count = 1;
    for (int s = 0; s < mdp.n_states; ++s) {
        count *= mdp.n_actions;
        if (count > cap)
            throw std::invalid_argument("enumerate_policies_oracle: policy count exceeds cap (" +
                                        std::to_string(cap) + ")");
    }
    std::vector<EnumeratedPolicy> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < count; ++idx) {
        std::vector<int> actions(static_cast<std::size_t>(mdp.n_states));
        std::int64_t rem = idx;
        for (int s = 0; s < mdp.n_states; ++s) {
            actions[static_cast<std::size_t>(s)] = static_cast<int>(rem % mdp.n_actions);
            rem /= mdp.n_actions;
        }
        auto policy = PolicyTable::deterministic(actions, mdp.n_actions);
        out[static_cast<std::size_t>(idx)] = {std::move(actions), value_at_initial(mdp, policy, 0.0)};
    }
    return out;
}

void export_coverage_csv(const CoverageSet& set, const PreferenceGrid& grid, const std::string& path) {
    const std::size_t n_dom = set.entries.empty() ? static_cast<std::size_t>(grid.n_domains)
                                                  : set.entries[0].value.size();
    std::vector<std::string> columns = {"policy_id"};
    for (std::size_t d = 0; d < n_dom; ++d) columns.push_back("value_" + std::to_string(d));
    for (std::size_t d = 0; d < n_dom; ++d) columns.push_back("witness_w" + std::to_string(d));
    CsvWriter csv(path, columns);
    for (const auto& e : set.entries) {
        std::vector<double> nums = e.value;
        if (e.witness_cell >= 0) {
            const auto& w = grid.weights(e.witness_cell);
            nums.insert(nums.end(), w.begin(), w.end());
        } else {
            nums.insert(nums.end(), n_dom, 0.0);
        }
        csv.row({std::to_string(e.policy_id)}, nums);
    }
}

} // namespace mdrl
