#pragma once

#include "mdrl/dp_solvers.hpp"
#include "mdrl/mdp.hpp"
#include "mdrl/utility.hpp"

// Plain single-threaded reference implementations of the parallel kernels.
// Written independently of the main code paths and kept for tests and the
// benchmark target; they trade speed for obviousness.
namespace mdrl::ref {

SolveResult solve_cmdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts = {});
SolveResult solve_emdrl(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts = {});
SolveResult solve_umdrl_v1(const MultiDomainMDP& mdp, const PreferenceGrid& grid, const SolveOptions& opts = {});
CoverageSet compute_ccs(const std::vector<ValueVector>& values, const PreferenceGrid& grid);

} // namespace mdrl::ref
