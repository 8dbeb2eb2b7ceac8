#include "mdrl/unscented.hpp"

#include "mdrl/exact_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdrl {

double uniform_moment(int k, double a, double b) {
    if (k < 0) throw std::invalid_argument("uniform_moment: k must be nonnegative");
    if (!(b > a)) throw std::invalid_argument("uniform_moment: need b > a");
    if (k == 0) return 1.0;
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (b - a));
}

namespace {

double logit(double x) { return std::log(x / (1.0 - x)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One coordinate: n points parameterized by logits so the box constraint is
// built in, squared residual over moments 1..K. Plain descent steps stall far
// above the tolerance on this Vandermonde-conditioned least-squares problem,
// so the main step is Levenberg-Marquardt with the fixed-rate descent step
// kept as a fallback when the damped system stops helping.
struct CoordSolve {
    std::vector<double> points;
    double residual = 0.0;
};

struct MomentEval {
    std::vector<double> err;      // e_k = sum_i s_i^k / n - 1/(k+1), k = 1..K
    std::vector<double> jacobian; // [k][i] = d e_k / d z_i
    double sq = 0.0;
    double max_abs = 0.0;
};

MomentEval eval_moments(const std::vector<double>& z, int order) {
    const int n = static_cast<int>(z.size());
    MomentEval ev;
    ev.err.assign(static_cast<std::size_t>(order), 0.0);
    ev.jacobian.assign(static_cast<std::size_t>(order) * n, 0.0);
    std::vector<double> s(static_cast<std::size_t>(n)), powers(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = sigmoid(z[static_cast<std::size_t>(i)]);
    for (int k = 1; k <= order; ++k) {
        double mk = 0.0;
        for (int i = 0; i < n; ++i) {
            powers[static_cast<std::size_t>(i)] *= s[static_cast<std::size_t>(i)];
            mk += powers[static_cast<std::size_t>(i)];
        }
        mk /= n;
        const double e = mk - 1.0 / (k + 1);
        ev.err[static_cast<std::size_t>(k - 1)] = e;
        ev.sq += e * e;
        ev.max_abs = std::max(ev.max_abs, std::abs(e));
        for (int i = 0; i < n; ++i)
            ev.jacobian[static_cast<std::size_t>(k - 1) * n + i] =
                k * powers[static_cast<std::size_t>(i)] * (1.0 - s[static_cast<std::size_t>(i)]) / n;
    }
    return ev;
}

CoordSolve solve_coordinate(int n, int order, double tol, int max_iter, double lr, Rng& rng) {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& zi : z) zi = logit(std::clamp(rng.next_double(), 0.02, 0.98));

    MomentEval ev = eval_moments(z, order);
    double lambda = 1e-3;
    std::vector<double> best_z = z;
    double best_residual = ev.max_abs;

    for (int iter = 0; iter < max_iter; ++iter) {
        if (ev.max_abs < best_residual) {
            best_residual = ev.max_abs;
            best_z = z;
        }
        if (ev.max_abs <= tol) break;

        std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> b(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < order; ++k)
                    acc += ev.jacobian[static_cast<std::size_t>(k) * n + i] *
                           ev.jacobian[static_cast<std::size_t>(k) * n + j];
                a[static_cast<std::size_t>(i) * n + j] = acc + (i == j ? lambda : 0.0);
            }
            double acc = 0.0;
            for (int k = 0; k < order; ++k)
                acc += ev.jacobian[static_cast<std::size_t>(k) * n + i] * ev.err[static_cast<std::size_t>(k)];
            b[static_cast<std::size_t>(i)] = -acc;
        }
        bool stepped = false;
        try {
            auto delta = solve_linear_system(std::move(a), std::move(b), n);
            std::vector<double> z_new(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                z_new[static_cast<std::size_t>(i)] =
                    std::clamp(z[static_cast<std::size_t>(i)] + delta[static_cast<std::size_t>(i)], -14.0, 14.0);
            MomentEval trial = eval_moments(z_new, order);
            if (trial.sq < ev.sq) {
                z = std::move(z_new);
                ev = std::move(trial);
                lambda = std::max(1e-12, lambda * 0.3);
                stepped = true;
            }
        } catch (const std::runtime_error&) {
            // singular damped system; fall through to the descent step
        }
        if (!stepped) {
            lambda *= 10.0;
            if (lambda > 1e8) {
                for (int i = 0; i < n; ++i) {
                    double g = 0.0;
                    for (int k = 0; k < order; ++k)
                        g += 2.0 * ev.err[static_cast<std::size_t>(k)] *
                             ev.jacobian[static_cast<std::size_t>(k) * n + i];
                    z[static_cast<std::size_t>(i)] -= lr * g;
                }
                ev = eval_moments(z, order);
                lambda = 1e-3;
            }
        }
    }
    CoordSolve out;
    out.residual = best_residual;
    out.points.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.points[static_cast<std::size_t>(i)] = sigmoid(best_z[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace

SigmaPointSet solve_sigma_points(int dim, int moment_order, double tolerance, Rng rng, int max_iter,
                                 double learning_rate) {
    if (dim < 1) throw std::invalid_argument("solve_sigma_points: dim must be >= 1");
    if (moment_order < 1) throw std::invalid_argument("solve_sigma_points: moment_order must be >= 1");
    SigmaPointSet set;
    set.dim = dim;
    set.n = 2 * dim + 1;
    set.moment_order = moment_order;
    set.points.assign(static_cast<std::size_t>(set.n) * dim, 0.0);
    double residual = 0.0;
    for (int c = 0; c < dim; ++c) {
        Rng coord_rng = rng.split(static_cast<std::uint64_t>(c) + 1);
        auto solved = solve_coordinate(set.n, moment_order, tolerance, max_iter, learning_rate, coord_rng);
        residual = std::max(residual, solved.residual);
        for (int i = 0; i < set.n; ++i)
            set.points[static_cast<std::size_t>(i) * dim + c] = solved.points[static_cast<std::size_t>(i)];
    }
    set.residual = residual;
    set.converged = residual <= tolerance;
    return set;
}

double moment_residual(const SigmaPointSet& set, int moment_order) {
    double worst = 0.0;
    for (int c = 0; c < set.dim; ++c) {
        for (int k = 1; k <= moment_order; ++k) {
            double mk = 0.0;
            for (int i = 0; i < set.n; ++i) mk += std::pow(set.at(i, c), k);
            mk /= set.n;
            worst = std::max(worst, std::abs(mk - 1.0 / (k + 1)));
        }
    }
    return worst;
}

std::vector<double> map_sigma_points(const SigmaPointSet& set, const Preference& pref) {
    if (!pref.is_box()) throw std::invalid_argument("map_sigma_points: preference must be a uniform box");
    if (static_cast<int>(pref.mu.size()) != set.dim)
        throw std::invalid_argument("map_sigma_points: dimension mismatch");
    const double scale = 2.0 * std::sqrt(3.0);
    std::vector<double> out(static_cast<std::size_t>(set.n) * set.dim);
    for (int i = 0; i < set.n; ++i)
        for (int c = 0; c < set.dim; ++c)
            out[static_cast<std::size_t>(i) * set.dim + c] =
                pref.mu[static_cast<std::size_t>(c)] +
                scale * pref.sigma[static_cast<std::size_t>(c)] * (set.at(i, c) - 0.5);
    return out;
}

std::pair<SigmaPointSet, SigmaPointSet> solve_sigma_point_pair(int dim, int moment_order, double tolerance,
                                                               std::uint64_t seed) {
    Rng root(seed);
    SigmaPointSet train = solve_sigma_points(dim, moment_order, tolerance, root.split(0xA11CE));
    SigmaPointSet eval = solve_sigma_points(dim, moment_order, tolerance, root.split(0xB0B));
    return {train, eval};
}

} // namespace mdrl
