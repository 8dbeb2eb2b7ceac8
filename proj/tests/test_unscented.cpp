#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mdrl/io.hpp"
#include "mdrl/unscented.hpp"

using namespace mdrl;

namespace {

// Experimentally obtained five-point set for the two-dimensional case; used as
// fixed reference data.
const std::vector<std::vector<double>> kReferenceTrainingPoints = {
    {0.68726563, 0.3149943}, {0.31273094, 0.68499416}, {0.0837525, 0.08276018},
    {0.91625065, 0.9172508}, {0.5, 0.5}};

SigmaPointSet as_set(const std::vector<std::vector<double>>& pts, int order) {
    SigmaPointSet set;
    set.dim = static_cast<int>(pts[0].size());
    set.n = static_cast<int>(pts.size());
    set.moment_order = order;
    for (const auto& p : pts)
        for (double x : p) set.points.push_back(x);
    return set;
}

std::string serialize(const SigmaPointSet& set) {
    std::ostringstream out;
    for (double x : set.points) out << fmt_fixed8(x) << ',';
    return out.str();
}

} // namespace

TEST_CASE("uniform moments in closed form") {
    CHECK(uniform_moment(0, -2.0, 3.5) == 1.0);
    CHECK(uniform_moment(1, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(uniform_moment(2, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(uniform_moment(7, 0.0, 1.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    CHECK(uniform_moment(2, -1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS(uniform_moment(1, 1.0, 1.0));
    CHECK_THROWS(uniform_moment(-1, 0.0, 1.0));
}

TEST_CASE("moment_residual on hand-built sets") {
    // symmetric three-point set matches the mean exactly
    auto sym = as_set({{0.0}, {0.5}, {1.0}}, 1);
    CHECK(moment_residual(sym, 1) == doctest::Approx(0.0).epsilon(1e-15));
    // the reference two-dimensional training set matches the mean to 1e-3
    auto ref = as_set(kReferenceTrainingPoints, 1);
    CHECK(moment_residual(ref, 1) <= 1e-3);
    CHECK(moment_residual(ref, 1) <= 1e-6); // in fact far tighter
    // its first ten moments sit on the same ~1e-4 plateau our solver reaches
    CHECK(moment_residual(ref, 5) <= 1e-3);
    CHECK(moment_residual(ref, 10) <= 1e-2);
    CHECK(moment_residual(ref, 10) >= 1e-5);
}

TEST_CASE("solver self-consistency: stored residual equals the independent check") {
    auto set = solve_sigma_points(2, 10, 1e-6, Rng(3));
    CHECK(set.residual == doctest::Approx(moment_residual(set, 10)).epsilon(1e-12));
}

TEST_CASE("feasible orders converge below tolerance") {
    for (int d : {1, 2, 3}) {
        const int order = 2 * d + 1;
        auto set = solve_sigma_points(d, order, 1e-6, Rng(17));
        CHECK(set.converged);
        CHECK(set.n == 2 * d + 1);
        CHECK(set.residual <= 1e-6);
        for (double x : set.points) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
    }
    // one-constraint case: the mean is matched essentially exactly
    auto single = solve_sigma_points(1, 1, 1e-6, Rng(4));
    CHECK(single.converged);
    double mean = 0.0;
    for (int i = 0; i < single.n; ++i) mean += single.at(i, 0);
    mean /= single.n;
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("order ten with n = 2d+1 points is best-effort for small d") {
    auto set = solve_sigma_points(2, 10, 1e-6, Rng(7));
    CHECK_FALSE(set.converged);
    CHECK(set.residual > 1e-6);
    CHECK(set.residual < 1e-2);
    // low moments stay accurate at the least-squares optimum
    double mean = 0.0;
    for (int i = 0; i < set.n; ++i) mean += set.at(i, 0);
    mean /= set.n;
    CHECK(std::abs(mean - 0.5) <= 1e-3);
}

TEST_CASE("higher dimensions make order ten feasible again") {
    auto set = solve_sigma_points(5, 10, 1e-6, Rng(7));
    CHECK(set.converged);
    CHECK(set.n == 11);
}

TEST_CASE("same seed gives bitwise-identical point sets") {
    auto a = solve_sigma_points(2, 10, 1e-6, Rng(99));
    auto b = solve_sigma_points(2, 10, 1e-6, Rng(99));
    CHECK(serialize(a) == serialize(b));
    auto c = solve_sigma_points(2, 10, 1e-6, Rng(100));
    CHECK(serialize(a) != serialize(c));
}

TEST_CASE("training and evaluation sets are disjoint for d = 2") {
    auto [train, eval] = solve_sigma_point_pair(2, 10, 1e-6, 12345);
    for (int i = 0; i < train.n; ++i)
        for (int j = 0; j < eval.n; ++j) {
            const bool same = train.at(i, 0) == eval.at(j, 0) && train.at(i, 1) == eval.at(j, 1);
            CHECK_FALSE(same);
        }
}

TEST_CASE("mapping onto a uniform box") {
    auto set = solve_sigma_points(1, 3, 1e-6, Rng(21));
    SUBCASE("zero sigma collapses every point to mu") {
        auto mapped = map_sigma_points(set, Preference::box({0.37}, {0.0}));
        for (double x : mapped) CHECK(x == doctest::Approx(0.37).epsilon(1e-15));
    }
    SUBCASE("the unit uniform target is the identity map") {
        auto mapped = map_sigma_points(set, Preference::box({0.5}, {1.0 / std::sqrt(12.0)}));
        for (int i = 0; i < set.n; ++i) CHECK(mapped[i] == doctest::Approx(set.at(i, 0)).epsilon(1e-12));
    }
    SUBCASE("pushed-forward mean and variance match the box moments") {
        const double mu = 1.4, sigma = 0.3;
        auto mapped = map_sigma_points(set, Preference::box({mu}, {sigma}));
        double m = 0.0, v = 0.0;
        for (double x : mapped) m += x;
        m /= set.n;
        for (double x : mapped) v += (x - m) * (x - m);
        v /= set.n;
        CHECK(m == doctest::Approx(mu).epsilon(1e-6));
        CHECK(v == doctest::Approx(sigma * sigma).epsilon(1e-5));
    }
    SUBCASE("affine equivariance: map of the mean is the mean of the map") {
        const double mu = -0.2, sigma = 0.7;
        auto mapped = map_sigma_points(set, Preference::box({mu}, {sigma}));
        double unit_mean = 0.0;
        for (int i = 0; i < set.n; ++i) unit_mean += set.at(i, 0);
        unit_mean /= set.n;
        double mapped_mean = 0.0;
        for (double x : mapped) mapped_mean += x;
        mapped_mean /= set.n;
        CHECK(mapped_mean == doctest::Approx(mu + 2.0 * std::sqrt(3.0) * sigma * (unit_mean - 0.5)).epsilon(1e-12));
    }
    CHECK_THROWS(map_sigma_points(set, Preference::discrete({0.5, 0.5})));
}
