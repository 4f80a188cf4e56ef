#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultraperc/meanfield.hpp"

using namespace ultraperc::meanfield;

namespace {

// independent oracle: iterate the fixed point map directly
double survival_by_iteration(double lambda) {
    if (lambda <= 1.0) return 0.0;
    // contraction factor approaches 1 as lambda -> 1, so iterate generously
    double b = 0.5;
    for (int i = 0; i < 20000; ++i) b = 1.0 - std::exp(-lambda * b);
    return b;
}

}  // namespace

TEST_CASE("survival_beta matches fixed-point iteration") {
    for (double lam : {1.05, 1.5, 2.0, 3.0, 10.0}) {
        CHECK(survival_beta(lam) ==
              doctest::Approx(survival_by_iteration(lam)).epsilon(1e-10));
    }
    CHECK(survival_beta(2.0) == doctest::Approx(0.7968121300200202).epsilon(1e-9));
    CHECK(survival_beta(1.0) == 0.0);
    CHECK(survival_beta(0.5) == 0.0);
    // residual of the defining equation
    const double b = survival_beta(4.0);
    CHECK(std::fabs(b - (1.0 - std::exp(-4.0 * b))) < 1e-11);
}

TEST_CASE("seq_value covers all families") {
    CHECK(seq_value(ConstantSeq{2.5}, 7) == doctest::Approx(2.5));
    CHECK(seq_value(ALogK{2.0, 0.0}, 1) == doctest::Approx(0.0));
    CHECK(seq_value(ALogK{2.0, 4.0}, 1) == doctest::Approx(2.0 * std::log(5.0)));
    CHECK(seq_value(TableSeq{{1.0, 2.0}}, 2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(seq_value(TableSeq{{1.0}}, 2), std::invalid_argument);
}

TEST_CASE("beta_sequence recursion checked by hand for constant c = 2") {
    const auto bs = beta_sequence(ConstantSeq{2.0}, 6);
    const double b1 = survival_by_iteration(2.0);
    CHECK(bs.lambda[0] == doctest::Approx(2.0));
    CHECK(bs.beta[0] == doctest::Approx(b1).epsilon(1e-10));
    const double lam2 = 2.0 * b1 * b1;
    CHECK(bs.lambda[1] == doctest::Approx(lam2).epsilon(1e-9));
    CHECK(bs.beta[1] == doctest::Approx(survival_by_iteration(lam2)).epsilon(1e-8));
    CHECK(bs.partial_product[1] == doctest::Approx(bs.beta[0] * bs.beta[1]).epsilon(1e-10));
    // lambda_3 = 2 beta_2^2 is already below 1: constants cannot sustain growth
    CHECK(bs.extinct);
    CHECK(bs.extinct_at == 3);
}

TEST_CASE("extinction is absorbing") {
    const auto bs = beta_sequence(TableSeq{{0.5, 100.0, 100.0}}, 3);
    CHECK(bs.extinct);
    CHECK(bs.extinct_at == 1);
    CHECK(bs.beta[0] == 0.0);
    CHECK(bs.beta[1] == 0.0);  // large later coefficients cannot revive it
    CHECK(bs.beta[2] == 0.0);
    CHECK(bs.partial_product[2] == 0.0);

    // the literal a ln k sequence dies at k = 1 because c_1 = 0
    const auto lit = beta_sequence(ALogK{2.0, 0.0}, 4);
    CHECK(lit.extinct);
    CHECK(lit.extinct_at == 1);
}

TEST_CASE("standing-assumption warnings fire exactly when crossed") {
    const auto low = beta_sequence(ConstantSeq{1.0}, 4);
    REQUIRE(low.warnings.size() == 2);
    CHECK(low.warnings[0] == "warning: c_1 <= 2 ln 2, below the standing assumption");
    CHECK(low.warnings[1] == "warning: c_2 <= 8 ln 2, below the standing assumption");
    const auto mid = beta_sequence(ConstantSeq{2.0}, 4);  // 2 ln 2 < 2 < 8 ln 2
    REQUIRE(mid.warnings.size() == 1);
    CHECK(mid.warnings[0].find("c_2") != std::string::npos);
    const auto high = beta_sequence(ConstantSeq{6.0}, 4);  // above both
    CHECK(high.warnings.empty());
}

TEST_CASE("percolation probability with growing coefficients") {
    // increments near k = 3000 are ~(k+4)^{-2} ~ 1e-7, so judge at 1e-6
    const auto pe = percolation_probability(ALogK{2.0, 4.0}, 3000, 1e-6);
    CHECK(pe.product > 0.0);
    CHECK(pe.product < 1.0);
    CHECK_FALSE(pe.extinct);
    CHECK(pe.converged);
    // with a < 1 the betas decay and the product dies before the horizon
    const auto dead = percolation_probability(ALogK{0.9, 4.0}, 3000, 1e-8);
    CHECK(dead.extinct);
    CHECK(dead.product == 0.0);
}

TEST_CASE("exp summability partial sums: zeta(2) oracle") {
    // c_k = 2 ln k, so exp(-c_k) = k^{-2}; horizon sum approaches pi^2/6
    const std::uint64_t kmax = 10000;
    const auto sr = exp_summability(ALogK{2.0, 0.0}, kmax);
    const double pi = 3.14159265358979323846;
    const double tail = 1.0 / static_cast<double>(kmax);  // integral bracket
    CHECK(sr.partial_sums.back() ==
          doctest::Approx(pi * pi / 6.0 - tail).epsilon(2e-8));
    CHECK(sr.summable_at_horizon);
    CHECK(sr.decade_ratio < 0.7);
}

TEST_CASE("exp summability: geometric oracle for constant coefficients") {
    // exp(-c) summed K times is exactly K exp(-c), and mass keeps growing
    const auto sr = exp_summability(ConstantSeq{1.0}, 1000);
    CHECK(sr.partial_sums[9] == doctest::Approx(10.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(sr.total == doctest::Approx(1000.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK_FALSE(sr.summable_at_horizon);
    CHECK_FALSE(sr.cauchy_1e9);
}

TEST_CASE("exp summability: harmonic borderline is not summable") {
    // c_k = ln k gives the harmonic series; decade masses stay level
    const auto sr = exp_summability(ALogK{1.0, 0.0}, 100000);
    CHECK(sr.decade_ratio > 0.9);
    CHECK_FALSE(sr.summable_at_horizon);
}

TEST_CASE("beta sequence horizon bookkeeping") {
    const auto bs = beta_sequence(ConstantSeq{3.0}, 100);
    REQUIRE(bs.beta.size() == 100);
    REQUIRE(bs.lambda.size() == 100);
    REQUIRE(bs.partial_product.size() == 100);
    for (std::size_t i = 1; i < 100; ++i)
        CHECK(bs.partial_product[i] <= bs.partial_product[i - 1] + 1e-15);
    CHECK_THROWS_AS(beta_sequence(ConstantSeq{3.0}, 0), std::invalid_argument);
}
