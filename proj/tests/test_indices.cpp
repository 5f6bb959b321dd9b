#include <cmath>
#include <stdexcept>
#include <vector>

#include "banditlab/indices.hpp"
#include "banditlab/rng.hpp"
#include "doctest.h"

using namespace banditlab;

TEST_CASE("optimistic index closed forms") {
    // At t = e the log is exactly 1, so the bonus is sqrt(alpha / pulls).
    const double e = std::exp(1.0);
    CHECK(ucb_index({2, 3}, e) ==
          doctest::Approx(0.4 + std::sqrt(1.0 / 3.0)).epsilon(1e-15));
    // Unexplored arm: the pull count is floored at one.
    CHECK(ucb_index({1, 1}, 10.0) ==
          doctest::Approx(0.5 + std::sqrt(std::log(10.0))).epsilon(1e-15));
    // Exploration weight scales under the square root.
    CHECK(ucb_index({2, 3}, e, {0.4}) ==
          doctest::Approx(0.4 + std::sqrt(0.4 / 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS((void)ucb_index({1, 1}, 0.5), std::invalid_argument);
}

TEST_CASE("index functions decompose into mean plus bonus") {
    const UcbIndex ucb({1.0});
    const BayesUcbIndex bucb(200, 0.0);
    const GreedyIndex greedy;
    RandomStream rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const ArmPosterior arm{1 + static_cast<int>(rng.uniform01() * 30),
                               1 + static_cast<int>(rng.uniform01() * 30)};
        const int t = 1 + static_cast<int>(rng.uniform01() * 199);
        CHECK(ucb.index(arm, t) == success_probability(arm) + ucb.bonus(arm, t));
        // The quantile index derives its bonus as index minus mean, so adding
        // the mean back is only guaranteed to within rounding, not bitwise.
        CHECK(bucb.index(arm, t) ==
              doctest::Approx(success_probability(arm) + bucb.bonus(arm, t)).epsilon(1e-12));
        CHECK(greedy.index(arm, t) == success_probability(arm));
        CHECK(greedy.bonus(arm, t) == 0.0);
    }
}

TEST_CASE("upper-quantile index closed forms") {
    // t=1: the level 1 - 1/t = 0 clamps to 0.5, the median; uniform median is 0.5.
    CHECK(bayes_ucb_index({1, 1}, 1, 100) == doctest::Approx(0.5).epsilon(1e-9));
    // t=100, flat prior: the 0.99 quantile of the uniform is 0.99.
    CHECK(bayes_ucb_index({1, 1}, 100, 100) == doctest::Approx(0.99).epsilon(1e-9));
    CHECK_THROWS_AS((void)bayes_ucb_index({1, 1}, 0, 100), std::invalid_argument);
    CHECK_THROWS_AS((void)bayes_ucb_index({1, 1}, 101, 100), std::invalid_argument);
}

TEST_CASE("upper-quantile index tightens with evidence") {
    // Same mean, more evidence: the upper quantile must come down.
    const double loose = bayes_ucb_index({2, 2}, 50, 200);
    const double tight = bayes_ucb_index({20, 20}, 50, 200);
    CHECK(loose > tight);
    CHECK(tight > 0.5);
}

TEST_CASE("index names") {
    CHECK(UcbIndex({1.0}).name() == "ucb(1)");
    CHECK(UcbIndex({0.4}).name() == "ucb(0.4)");
    CHECK(UcbIndex({2.0}).name() == "ucb(2)");
    CHECK(BayesUcbIndex(200, 0.0).name() == "bayes_ucb(c=0)");
    CHECK(GreedyIndex().name() == "greedy");
}

TEST_CASE("near-tie argmax prefers the lowest index among indistinguishable values") {
    CHECK(argmax_near_ties(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(argmax_near_ties(std::vector<double>{0.5, 0.5 + 5e-11}) == 0);
    CHECK(argmax_near_ties(std::vector<double>{0.5, 0.5 + 1e-9}) == 1);
    CHECK(argmax_near_ties(std::vector<double>{2.0, 1.0, 3.0, 3.0}) == 2);
    CHECK_THROWS_AS((void)argmax_near_ties(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("index policy picks the larger index and breaks ties low") {
    BanditState s;
    s.arms = {{1, 1}, {3, 1}};
    s.t = 4;
    const GreedyIndex greedy;
    CHECK(index_policy_choose(s, greedy) == 1);  // 0.75 beats 0.5

    BanditState tie;
    tie.arms = {{2, 2}, {1, 1}};
    tie.t = 3;
    CHECK(index_policy_choose(tie, greedy) == 0);  // both 0.5

    const UcbIndex ucb({1.0});
    // Equal means; the less-pulled arm gets the bigger bonus.
    CHECK(index_policy_choose(tie, ucb) == 1);
}

TEST_CASE("reward weighting can flip the index choice") {
    BanditState s;
    s.arms = {{9, 1}, {6, 4}};
    s.t = 11;
    const GreedyIndex greedy;
    CHECK(index_policy_choose(s, greedy) == 0);
    const std::vector<double> rewards{0.5, 1.0};
    CHECK(index_policy_choose(s, greedy, rewards) == 1);  // 0.45 vs 0.6
    const std::vector<double> ones{1.0, 1.0};
    CHECK(index_policy_choose(s, greedy, ones) == index_policy_choose(s, greedy));
    const std::vector<double> wrong_size{1.0};
    CHECK_THROWS_AS((void)index_policy_choose(s, greedy, wrong_size), std::invalid_argument);
}

TEST_CASE("posterior sampling favors the dominant arm") {
    BanditState s;
    s.arms = {{500, 1}, {1, 500}};
    s.t = 1000;
    RandomStream rng(43);
    for (int i = 0; i < 100; ++i) CHECK(thompson_choose(s, rng) == 0);
}

TEST_CASE("posterior sampling is deterministic given the stream") {
    BanditState s;
    s.arms = {{3, 2}, {2, 3}, {4, 4}};
    s.t = 10;
    std::vector<int> first, second;
    RandomStream a(47), b(47);
    for (int i = 0; i < 50; ++i) first.push_back(thompson_choose(s, a));
    for (int i = 0; i < 50; ++i) second.push_back(thompson_choose(s, b));
    CHECK(first == second);
}

TEST_CASE("reward-weighted posterior sampling shifts mass to valuable arms") {
    BanditState s;
    s.arms = {{5, 5}, {5, 5}};
    s.t = 11;
    const std::vector<double> rewards{0.01, 1.0};
    RandomStream rng(53);
    int second = 0;
    for (int i = 0; i < 200; ++i) second += thompson_choose(s, rng, rewards) == 1 ? 1 : 0;
    CHECK(second > 190);  // nearly always the high-revenue arm
}
