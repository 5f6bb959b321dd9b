#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "banditlab/indices.hpp"
#include "banditlab/planner.hpp"
#include "banditlab/rng.hpp"
#include "doctest.h"

using namespace banditlab;

namespace {

// Binomial coefficient, small arguments only.
std::size_t choose_k(int n, int k) {
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / i;
    return r;
}

TableList zero_tables(int t, int n_arms) {
    auto table = std::make_shared<const ValueTable>(compute_value_table(t, zero_bonus().fn));
    return TableList(static_cast<std::size_t>(n_arms), table);
}

BanditState uniform_root(int n_arms) {
    BanditState s;
    s.arms.assign(static_cast<std::size_t>(n_arms), ArmPosterior{1, 1});
    s.t = 1;
    return s;
}

}

TEST_CASE("action value has its closed form under zero tables") {
    // v == 0 everywhere, so q is just the expected immediate reward.
    BanditState s;
    s.arms = {{2, 3}, {1, 1}};
    s.t = 4;
    const TableList tables = zero_tables(8, 2);
    const std::vector<double> rewards{1.0, 1.0};
    CHECK(q_value(s, 0, tables, rewards) == 0.4);
    CHECK(q_value(s, 1, tables, rewards) == 0.5);
    const std::vector<double> weighted{0.5, 0.25};
    CHECK(q_value(s, 0, tables, weighted) == 0.4 * 0.5);
    CHECK_THROWS_AS((void)q_value(s, 2, tables, rewards), std::invalid_argument);
}

TEST_CASE("action value mixes successor table values by the posterior mean") {
    const double c = 0.25;
    auto table = std::make_shared<const ValueTable>(
        compute_value_table(4, [c](int, int, int) { return c; }));
    const TableList tables{table, table};
    BanditState s;
    s.arms = {{1, 1}, {1, 2}};
    s.t = 2;
    const std::vector<double> rewards{1.0, 1.0};
    // In the t=4 triangle a constant bonus c gives v = -(3 - depth)*c, so
    // every depth-1 successor arm carries v = -2c. Both outcome branches
    // land on two depth-1 arms (total -4c), hence
    //   q = 0.5*(1 - 4c) + 0.5*(-4c) = 0.5 - 4c.
    CHECK(q_value(s, 0, tables, rewards) == doctest::Approx(0.5 - 4.0 * c).epsilon(1e-12));
}

TEST_CASE("one-step lookahead is the argmax of the action values") {
    RandomStream rng(61);
    TableCache cache(ucb_bonus(1.0));
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3);
        BanditState s;
        s.t = 1;
        for (int i = 0; i < n; ++i) {
            const int a = 1 + static_cast<int>(rng.uniform01() * 12);
            const int b = 1 + static_cast<int>(rng.uniform01() * 12);
            s.arms.push_back({a, b});
            s.t += a + b - 2;
        }
        const TableList tables = cache.decision_tables(s.t, n);
        const std::vector<double> rewards(static_cast<std::size_t>(n), 1.0);
        std::vector<double> q(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) q[i] = q_value(s, i, tables, rewards);
        CHECK(lookahead_choose(s, 1, tables, rewards) == argmax_near_ties(q));
    }
}

TEST_CASE("lookahead validates its arguments") {
    const TableList tables = zero_tables(6, 2);
    const std::vector<double> rewards{1.0, 1.0};
    BanditState s = uniform_root(2);
    CHECK_THROWS_AS((void)lookahead_choose(s, 0, tables, rewards), std::invalid_argument);
    const std::vector<double> short_rewards{1.0};
    CHECK_THROWS_AS((void)lookahead_choose(s, 1, tables, short_rewards), std::invalid_argument);
    const TableList short_tables = zero_tables(6, 1);
    CHECK_THROWS_AS((void)lookahead_choose(s, 1, short_tables, rewards), std::invalid_argument);
}

TEST_CASE("outcome branches merge: frontier growth is polynomial, not exponential") {
    // From the uniform root with N arms, the distinct arm-state tuples after
    // k pulls are the weak compositions weighted by per-arm splits:
    // choose(k + 2N - 1, 2N - 1).
    SUBCASE("two arms, depth 3") {
        BanditState s = uniform_root(2);
        const TableList tables = zero_tables(8, 2);
        const std::vector<double> rewards{1.0, 1.0};
        LookaheadStats stats;
        (void)lookahead_choose(s, 3, tables, rewards, &stats);
        CHECK(stats.frontier_states == choose_k(3 + 3, 3));  // 20
        // Internal levels: k = 0, 1, 2 pulls.
        CHECK(stats.expanded == choose_k(3, 3) + choose_k(4, 3) + choose_k(5, 3));  // 15
    }
    SUBCASE("three arms, depth 2") {
        BanditState s = uniform_root(3);
        const TableList tables = zero_tables(8, 3);
        const std::vector<double> rewards{1.0, 1.0, 1.0};
        LookaheadStats stats;
        (void)lookahead_choose(s, 2, tables, rewards, &stats);
        CHECK(stats.frontier_states == choose_k(2 + 5, 5));  // 21
        CHECK(stats.expanded == choose_k(5, 5) + choose_k(6, 5));  // 1 + 6
    }
    SUBCASE("deep search: a brute tree would be astronomically larger") {
        BanditState s = uniform_root(2);
        const TableList tables = zero_tables(16, 2);
        const std::vector<double> rewards{1.0, 1.0};
        LookaheadStats stats;
        (void)lookahead_choose(s, 12, tables, rewards, &stats);
        CHECK(stats.frontier_states == choose_k(12 + 3, 3));  // 455 vs 4^12 = 16M branches
    }
}

TEST_CASE("symmetric states break ties toward the first arm") {
    BanditState s = uniform_root(3);
    TableCache cache(ucb_bonus(1.0));
    const TableList tables = cache.decision_tables(1, 3);
    const std::vector<double> rewards{1.0, 1.0, 1.0};
    CHECK(lookahead_choose(s, 1, tables, rewards) == 0);
}

TEST_CASE("rejection sampling estimates the order-constrained posterior mean") {
    SUBCASE("two fresh arms: order statistics of two uniforms") {
        BanditState s = uniform_root(2);
        RandomStream rng(67);
        const ConstrainedMeans m = constrained_posterior_means(s, rng, 40000, 100);
        CHECK_FALSE(m.fallback);
        CHECK(m.means[0] == doctest::Approx(2.0 / 3.0).epsilon(0.02));
        CHECK(m.means[1] == doctest::Approx(1.0 / 3.0).epsilon(0.02));
        // Two i.i.d. draws are correctly ordered half the time.
        CHECK(static_cast<double>(m.accepted) / 40000 == doctest::Approx(0.5).epsilon(0.05));
    }
    SUBCASE("three fresh arms") {
        BanditState s = uniform_root(3);
        RandomStream rng(71);
        const ConstrainedMeans m = constrained_posterior_means(s, rng, 60000, 100);
        CHECK_FALSE(m.fallback);
        CHECK(m.means[0] == doctest::Approx(0.75).epsilon(0.03));
        CHECK(m.means[1] == doctest::Approx(0.50).epsilon(0.03));
        CHECK(m.means[2] == doctest::Approx(0.25).epsilon(0.03));
        CHECK(static_cast<double>(m.accepted) / 60000 ==
              doctest::Approx(1.0 / 6.0).epsilon(0.1));
    }
    SUBCASE("ordering respected within estimator noise even off the prior") {
        BanditState s;
        s.arms = {{4, 8}, {3, 3}};  // posterior mass mostly against the ordering
        s.t = 11;
        RandomStream rng(73);
        const ConstrainedMeans m = constrained_posterior_means(s, rng, 50000, 100);
        CHECK_FALSE(m.fallback);
        CHECK(m.means[0] >= m.means[1] - 1e-3);
    }
}

TEST_CASE("rejection sampling falls back to unconstrained means when starved") {
    BanditState s;
    s.arms = {{1, 40}, {40, 1}};  // ordering essentially impossible
    s.t = 80;
    RandomStream rng(79);
    const ConstrainedMeans m = constrained_posterior_means(s, rng, 300, 100);
    CHECK(m.fallback);
    CHECK(m.means[0] == success_probability(s.arms[0]));
    CHECK(m.means[1] == success_probability(s.arms[1]));
}

TEST_CASE("constrained one-step rule maximizes the substituted action value") {
    BanditState s = uniform_root(2);
    const TableList tables = zero_tables(4, 2);
    PlannerConfig config;
    config.sample_count = 20000;

    SUBCASE("equal rewards: the larger constrained mean wins") {
        RandomStream rng(83);
        const std::vector<double> rewards{1.0, 1.0};
        ConstrainedMeans means;
        const int arm = constrained_lookahead_choose(s, tables, rewards, rng, config, &means);
        CHECK(arm == 0);  // mean ~2/3 beats ~1/3 under zero tables
        CHECK(means.means.size() == 2);
        CHECK_FALSE(means.fallback);
    }
    SUBCASE("rewards can flip the choice") {
        RandomStream rng(89);
        const std::vector<double> rewards{0.2, 1.0};
        const int arm = constrained_lookahead_choose(s, tables, rewards, rng, config);
        CHECK(arm == 1);  // 0.2 * 2/3 << 1.0 * 1/3
    }
}
