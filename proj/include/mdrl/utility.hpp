#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdrl/exact_eval.hpp"
#include "mdrl/mdp.hpp"

namespace mdrl {

/// Scalarization f_w(V) = w^T V, the preference-expected per-domain value.
double linear_utility(const ValueVector& v, const Preference& pref);

/// Weak dominance: a >= b componentwise with strict improvement somewhere.
bool pareto_dominates(const ValueVector& a, const ValueVector& b);

struct CoverageEntry {
    int policy_id = 0;       ///< index into the input sequence
    ValueVector value;
    int witness_cell = -1;   ///< CCS: first grid cell where this entry attains the maximum
};

struct CoverageSet {
    enum class Kind { PCS, CCS };
    Kind kind = Kind::PCS;
    std::vector<CoverageEntry> entries;
};

/// Non-dominated subset of the inputs. Idempotent; throws on empty input.
CoverageSet compute_pcs(const std::vector<ValueVector>& values);

/// PCS members that attain the maximal scalarized value for at least one grid
/// preference. CCS is a subset of PCS by construction; membership on the grid
/// is the documented approximation of the continuum definition.
CoverageSet compute_ccs(const std::vector<ValueVector>& values, const PreferenceGrid& grid);

/// Maximum inner product over the set and its argmax index, ties to the lowest
/// index.
std::pair<double, int> optimal_scalarized_value(const std::vector<ValueVector>& values, const Preference& pref);

struct EnumeratedPolicy {
    std::vector<int> actions; ///< deterministic action per state
    ValueVector value;        ///< exact alpha = 0 value at the initial distribution
};

/// Every deterministic stationary policy, evaluated exactly. Throws when
/// n_actions^n_states exceeds the cap.
std::vector<EnumeratedPolicy> enumerate_policies_oracle(const MultiDomainMDP& mdp, std::int64_t cap = 200000);

/// CSV export: policy id, per-domain values, witness preference weights.
void export_coverage_csv(const CoverageSet& set, const PreferenceGrid& grid, const std::string& path);

} // namespace mdrl
