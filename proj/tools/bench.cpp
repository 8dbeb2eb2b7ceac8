// Benchmark: OpenMP solver kernels against the plain serial reference on a
// larger-than-default instance, verifying agreement while timing both.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "mdrl/dp_solvers.hpp"
#include "mdrl/envs.hpp"
#include "mdrl/reference.hpp"
#include "mdrl/utility.hpp"

using namespace mdrl;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

int main() {
    const auto mdp = build_two_domain_chain(9, 0.15, 0.85, 0.01, 1.0, 0.95);
    const auto grid = PreferenceGrid::simplex(2, 64);
    SolveOptions par;
    par.tol = 1e-9;
    SolveOptions ser = par;
    ser.parallel = false;

    std::printf("%-28s %12s %12s %10s %12s\n", "kernel", "parallel[s]", "serial[s]", "speedup", "max|diff|");

    {
        auto t0 = Clock::now();
        auto a = solve_cmdrl(mdp, grid, par);
        const double tp = seconds_since(t0);
        t0 = Clock::now();
        auto b = ref::solve_cmdrl(mdp, grid, ser);
        const double ts = seconds_since(t0);
        std::printf("%-28s %12.4f %12.4f %9.2fx %12.3e\n", "solve_cmdrl", tp, ts, ts / tp,
                    max_abs_diff(a.q.q, b.q.q));
    }
    {
        auto t0 = Clock::now();
        auto a = solve_emdrl(mdp, grid, par);
        const double tp = seconds_since(t0);
        t0 = Clock::now();
        auto b = ref::solve_emdrl(mdp, grid, ser);
        const double ts = seconds_since(t0);
        std::printf("%-28s %12.4f %12.4f %9.2fx %12.3e\n", "solve_emdrl", tp, ts, ts / tp,
                    max_abs_diff(a.q.q, b.q.q));
    }
    {
        auto t0 = Clock::now();
        auto a = solve_umdrl_v1(mdp, grid, par);
        const double tp = seconds_since(t0);
        t0 = Clock::now();
        auto b = ref::solve_umdrl_v1(mdp, grid, ser);
        const double ts = seconds_since(t0);
        std::printf("%-28s %12.4f %12.4f %9.2fx %12.3e\n", "solve_umdrl_v1", tp, ts, ts / tp,
                    max_abs_diff(a.q.q, b.q.q));
    }
    {
        // Coverage-set kernel on a large random cloud.
        Rng rng(7);
        std::vector<ValueVector> values;
        for (int i = 0; i < 4000; ++i) values.push_back({rng.next_double(), rng.next_double()});
        const auto fine = PreferenceGrid::simplex(2, 4096);
        auto t0 = Clock::now();
        auto a = compute_ccs(values, fine);
        const double tp = seconds_since(t0);
        t0 = Clock::now();
        auto b = ref::compute_ccs(values, fine);
        const double ts = seconds_since(t0);
        std::printf("%-28s %12.4f %12.4f %9.2fx %12s\n", "compute_ccs", tp, ts, ts / tp,
                    a.entries.size() == b.entries.size() ? "match" : "MISMATCH");
    }
    return 0;
}
