#pragma once

#include <vector>

#include "mdrl/mdp.hpp"
#include "mdrl/rng.hpp"

namespace mdrl {

/// Equal-weight discretization {S_i, 1/n} of the unit uniform distribution,
/// n = 2d + 1 points per the unscented-transform construction.
struct SigmaPointSet {
    int dim = 0;
    int n = 0;            ///< 2 * dim + 1
    int moment_order = 0; ///< highest raw-moment order targeted by the solver
    std::vector<double> points; ///< [point][coordinate], all in [0, 1]
    double residual = 0.0;      ///< max abs moment mismatch over coordinates and k <= moment_order
    bool converged = false;

    double weight() const { return 1.0 / n; }
    double at(int i, int c) const { return points[static_cast<std::size_t>(i) * dim + c]; }
};

/// k-th raw moment of U(a, b): (b^{k+1} - a^{k+1}) / ((k+1)(b-a)).
double uniform_moment(int k, double a, double b);

/// Numerically solves for points in [0,1]^d whose equal-weight empirical raw
/// moments match those of U(0,1) per coordinate, up to `moment_order`, by
/// gradient (mirror) descent on the squared residual through a logit
/// reparameterization. Deterministic given the rng seed. When the residual
/// cannot be driven below `tolerance` within `max_iter` iterations the best
/// point set found is returned with converged = false.
SigmaPointSet solve_sigma_points(int dim, int moment_order, double tolerance, Rng rng, int max_iter = 200000,
                                 double learning_rate = 0.05);

/// Independent check: max over coordinates and k <= moment_order of
/// |sum_i S_i^k / n - 1/(k+1)|.
double moment_residual(const SigmaPointSet& set, int moment_order);

/// Affine map of unit sigma points onto a uniform-box preference:
/// mu + 2 sqrt(3) sigma (S_i - 1/2) per coordinate, so the image of [0,1] is
/// the box support [mu - sqrt(3) sigma, mu + sqrt(3) sigma]. Returns an
/// n x dim matrix (row-major).
std::vector<double> map_sigma_points(const SigmaPointSet& set, const Preference& pref);

/// Training/evaluation pair solved from disjoint streams of the same seed,
/// mirroring the held-out-points evaluation protocol.
std::pair<SigmaPointSet, SigmaPointSet> solve_sigma_point_pair(int dim, int moment_order, double tolerance,
                                                               std::uint64_t seed);

} // namespace mdrl
