// Times the OpenMP kernels against their serial reference implementations
// and verifies the outputs are bitwise identical. Build target only; not
// part of the test suite.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "banditlab/gittins.hpp"
#include "banditlab/harness.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double timed(F&& fn) {
    const auto start = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both runs use the serial path\n");
#endif

    // Kernel 1: index tabulation, parallel over the retirement-rate grid.
    banditlab::GittinsParams params;
    params.max_pulls = 150;
    params.horizon = 950;
    banditlab::GittinsTable serial_table, parallel_table;
    const double t_serial =
        timed([&] { serial_table = banditlab::compute_gittins_table_serial(params); });
    const double t_parallel =
        timed([&] { parallel_table = banditlab::compute_gittins_table(params); });
    const bool table_match = bitwise_equal(serial_table.values, parallel_table.values) &&
                             serial_table.params == parallel_table.params;
    std::printf("index tabulation (max_pulls=%d, horizon=%d):\n", params.max_pulls,
                params.horizon);
    std::printf("  serial   %.3fs\n  parallel %.3fs  (speedup %.2fx)\n", t_serial, t_parallel,
                t_serial / t_parallel);
    std::printf("  bitwise match: %s\n", table_match ? "yes" : "NO");

    // Kernel 2: Monte Carlo regret benchmark, parallel over instances.
    banditlab::ExperimentConfig config;
    config.prior = banditlab::make_prior(3);
    config.policy.kind = banditlab::PolicyKind::ucb;
    config.horizon = 200;
    config.n_instances = 2000;
    config.master_seed = 42;
    banditlab::RegretCurve serial_curve, parallel_curve;
    const double r_serial = timed([&] { serial_curve = banditlab::bayes_regret_serial(config); });
    const double r_parallel = timed([&] { parallel_curve = banditlab::bayes_regret(config); });
    const bool curve_match = bitwise_equal(serial_curve.mean_cum, parallel_curve.mean_cum) &&
                             bitwise_equal(serial_curve.ci_half, parallel_curve.ci_half);
    std::printf("regret benchmark (%d instances, horizon %d):\n", config.n_instances,
                config.horizon);
    std::printf("  serial   %.3fs\n  parallel %.3fs  (speedup %.2fx)\n", r_serial, r_parallel,
                r_serial / r_parallel);
    std::printf("  bitwise match: %s\n", curve_match ? "yes" : "NO");

    if (!table_match || !curve_match) {
        std::printf("FAILURE: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    std::printf("parallel kernels match the serial references bitwise\n");
    return 0;
}
