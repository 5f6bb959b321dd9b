#include <cmath>
#include <stdexcept>

#include "banditlab/beta_math.hpp"
#include "banditlab/rng.hpp"
#include "doctest.h"

using banditlab::beta_pdf;
using banditlab::beta_quantile;
using banditlab::log_beta;
using banditlab::reg_inc_beta;

TEST_CASE("log_beta matches small closed forms") {
    // B(1,1)=1, B(2,1)=1/2, B(2,2)=1/6, B(3,2)=1/12
    CHECK(log_beta(1, 1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(log_beta(2, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    CHECK(log_beta(2, 2) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-14));
    CHECK(log_beta(3, 2) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-14));
}

TEST_CASE("regularized incomplete beta matches polynomial closed forms") {
    for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        CHECK(reg_inc_beta(x, 1, 1) == doctest::Approx(x).epsilon(1e-13));
        CHECK(reg_inc_beta(x, 2, 1) == doctest::Approx(x * x).epsilon(1e-12));
        CHECK(reg_inc_beta(x, 1, 2) ==
              doctest::Approx(1.0 - (1.0 - x) * (1.0 - x)).epsilon(1e-12));
        CHECK(reg_inc_beta(x, 2, 2) == doctest::Approx(x * x * (3.0 - 2.0 * x)).epsilon(1e-12));
    }
}

TEST_CASE("regularized incomplete beta satisfies the reflection identity") {
    banditlab::RandomStream rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = 1.0 + 60.0 * rng.uniform01();
        const double b = 1.0 + 60.0 * rng.uniform01();
        const double x = rng.uniform01();
        const double lhs = reg_inc_beta(x, a, b);
        const double rhs = 1.0 - reg_inc_beta(1.0 - x, b, a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("regularized incomplete beta is monotone in x") {
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double cur = reg_inc_beta(i / 200.0, 7, 3);
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantile inverts the distribution function") {
    banditlab::RandomStream rng(37);
    for (int trial = 0; trial < 400; ++trial) {
        const double a = 1 + static_cast<int>(rng.uniform01() * 100);
        const double b = 1 + static_cast<int>(rng.uniform01() * 100);
        const double p = std::min(1.0 - 1e-6, std::max(1e-6, rng.uniform01()));
        const double q = beta_quantile(p, a, b);
        CHECK(q > 0.0);
        CHECK(q < 1.0);
        CHECK(std::fabs(reg_inc_beta(q, a, b) - p) <= 1e-10);
    }
}

TEST_CASE("quantile closed forms") {
    // Uniform: quantile is the identity.
    CHECK(beta_quantile(0.37, 1, 1) == doctest::Approx(0.37).epsilon(1e-10));
    // Beta(2,1): F(x) = x^2, so q(1/4) = 1/2.
    CHECK(beta_quantile(0.25, 2, 1) == doctest::Approx(0.5).epsilon(1e-10));
    // Beta(1,2): F(x) = 1-(1-x)^2, so q(p) = 1 - sqrt(1-p).
    CHECK(beta_quantile(0.19, 1, 2) == doctest::Approx(1.0 - std::sqrt(0.81)).epsilon(1e-10));
    // Median of the symmetric Beta(2,2) is 1/2.
    CHECK(beta_quantile(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("quantile handles extreme levels used by the upper-quantile index") {
    const double q = beta_quantile(1.0 - 1e-12, 3, 4);
    CHECK(q > 0.99);
    CHECK(q < 1.0);
    const double lo = beta_quantile(1e-12, 3, 4);
    CHECK(lo > 0.0);
    CHECK(lo < 0.01);
}

TEST_CASE("domain violations throw") {
    CHECK_THROWS_AS((void)reg_inc_beta(-0.1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)reg_inc_beta(1.1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)reg_inc_beta(0.5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)beta_quantile(0.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)beta_quantile(1.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)beta_quantile(0.5, -1, 1), std::invalid_argument);
}

TEST_CASE("pdf integrates against the distribution function") {
    // Central difference of the CDF approximates the density.
    for (double x : {0.2, 0.5, 0.8}) {
        const double h = 1e-6;
        const double num =
            (reg_inc_beta(x + h, 5, 2) - reg_inc_beta(x - h, 5, 2)) / (2.0 * h);
        CHECK(beta_pdf(x, 5, 2) == doctest::Approx(num).epsilon(1e-6));
    }
    CHECK(beta_pdf(0.0, 5, 2) == 0.0);
    CHECK(beta_pdf(1.0, 5, 2) == 0.0);
}
