#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "affmap/core/rng.hpp"
#include "affmap/stats/fisher.hpp"
#include "affmap/stats/gaussian.hpp"
#include "oracles.hpp"

using affmap::stats::fisher_quantile;
using affmap::stats::GaussianDensity;
using affmap::stats::incomplete_beta;
using affmap::stats::incomplete_beta_inv;
using affmap::stats::log_sum_exp;

TEST_CASE("incomplete beta basics") {
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1,1) = x
    CHECK_THAT(incomplete_beta(1.0, 1.0, 0.37), Catch::Matchers::WithinAbs(0.37, 1e-14));
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK_THAT(incomplete_beta(2.5, 4.0, 0.3), Catch::Matchers::WithinAbs(1.0 - incomplete_beta(4.0, 2.5, 0.7), 1e-13));
    // median of the symmetric case
    CHECK_THAT(incomplete_beta(5.0, 5.0, 0.5), Catch::Matchers::WithinAbs(0.5, 1e-13));
    CHECK_THROWS_AS(incomplete_beta(-1.0, 2.0, 0.5), std::domain_error);
}

TEST_CASE("incomplete beta inverse round-trips") {
    for (double a : {0.5, 1.0, 6.0, 24.0}) {
        for (double b : {0.5, 2.0, 17.5}) {
            for (double y : {1e-6, 0.02, 0.4, 0.5, 0.77, 0.999}) {
                const double x = incomplete_beta_inv(a, b, y);
                CHECK_THAT(incomplete_beta(a, b, x), Catch::Matchers::WithinAbs(y, 1e-10));
            }
        }
    }
}

TEST_CASE("fisher quantile median of F(d,d) is exactly 1") {
    for (int d : {1, 10, 48}) {
        CHECK_THAT(fisher_quantile(0.5, d, d), Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("fisher quantile closed forms") {
    // d1 = d2 = 1: quantile(p) = cot^2((1-p) pi / 2)
    const double q95 = 1.0 / std::pow(std::tan(0.025 * M_PI), 2.0);
    CHECK_THAT(fisher_quantile(0.95, 1, 1), Catch::Matchers::WithinRel(q95, 1e-10));
    CHECK_THAT(fisher_quantile(0.95, 1, 1), Catch::Matchers::WithinRel(161.44763879758827, 1e-9));
    // d1 = d2 = 2: CDF z = I_z(1,1), quantile(p) = p/(1-p)
    CHECK_THAT(fisher_quantile(0.8, 2, 2), Catch::Matchers::WithinRel(4.0, 1e-10));
}

TEST_CASE("fisher quantile vs numeric-integration oracle") {
    struct Triple {
        double prob;
        int d1, d2;
    };
    const Triple triples[] = {
        {0.01, 2, 3},  {0.1, 5, 7},    {0.25, 10, 3},  {0.4, 48, 12}, {0.6, 1, 10},
        {0.75, 7, 7},  {0.9, 3, 20},   {0.95, 1, 1},   {0.975, 12, 48}, {0.99, 30, 30},
        {0.5, 5, 9},   {0.33, 9, 5},   {0.8, 2, 2},    {0.666, 48, 48}, {0.05, 48, 12},
        {0.55, 100, 3}, {0.875, 3, 100}, {0.125, 6, 6}, {0.9999, 4, 4},  {0.62, 17, 23},
    };
    for (const auto& t : triples) {
        const double mine = fisher_quantile(t.prob, t.d1, t.d2);
        const double ref = oracle::f_quantile(t.prob, t.d1, t.d2);
        INFO("prob=" << t.prob << " d1=" << t.d1 << " d2=" << t.d2);
        CHECK_THAT(mine, Catch::Matchers::WithinRel(ref, 1e-6));
    }
    // the oracle agrees with an externally tabulated value
    CHECK_THAT(oracle::f_quantile(0.4, 48, 12), Catch::Matchers::WithinRel(0.9287352171571501, 1e-8));
}

TEST_CASE("fisher quantile is monotone in prob") {
    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.05) {
        const double q = fisher_quantile(p, 7, 13);
        CHECK(q > prev);
        prev = q;
    }
}

TEST_CASE("fisher quantile domain errors") {
    CHECK_THROWS_AS(fisher_quantile(0.0, 3, 3), std::domain_error);
    CHECK_THROWS_AS(fisher_quantile(1.0, 3, 3), std::domain_error);
    CHECK_THROWS_AS(fisher_quantile(-0.2, 3, 3), std::domain_error);
    CHECK_THROWS_AS(fisher_quantile(0.5, 0, 3), std::domain_error);
}

TEST_CASE("gaussian log density matches direct evaluation") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 2 + static_cast<int>(affmap::uniform_index(gen, 5));
        Eigen::VectorXd mean(p), x(p);
        for (int i = 0; i < p; ++i) {
            mean[i] = 2.0 * affmap::uniform01(gen) - 1.0;
            x[i] = 2.0 * affmap::uniform01(gen) - 1.0;
        }
        Eigen::MatrixXd a(p, p);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) a(i, j) = affmap::normal01(gen);
        }
        const Eigen::MatrixXd cov = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
        const GaussianDensity g(mean, cov);
        const double direct = oracle::gaussian_density(mean, cov, x);
        CHECK_THAT(std::exp(g.log_density(x)), Catch::Matchers::WithinRel(direct, 1e-9));
    }
}

TEST_CASE("log sum exp") {
    const double vals[] = {std::log(2.0), std::log(3.0)};
    CHECK_THAT(log_sum_exp(vals), Catch::Matchers::WithinAbs(std::log(5.0), 1e-12));
    CHECK(std::isinf(log_sum_exp({})));
    const double huge[] = {1000.0, 1000.0};
    CHECK_THAT(log_sum_exp(huge), Catch::Matchers::WithinAbs(1000.0 + std::log(2.0), 1e-9));
}

TEST_CASE("deterministic rng helpers") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(affmap::uniform01(a) == affmap::uniform01(b));
    }
    std::mt19937_64 g(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = affmap::uniform01(g);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(affmap::uniform_index(g, 7) < 7);
    }
    // categorical respects degenerate maps
    const double w[] = {0.0, 1.0, 0.0};
    for (int i = 0; i < 20; ++i) CHECK(affmap::categorical(g, w) == 1);
}
