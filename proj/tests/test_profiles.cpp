#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ultraperc/profiles.hpp"

using namespace ultraperc::profiles;

TEST_CASE("constant and logpoly coefficient families") {
    ConnectionProfile p;
    p.N = 2;
    p.delta = 1.0;
    p.family = Constant{3.5};
    CHECK(c_k(p, 1) == doctest::Approx(3.5));
    CHECK(c_k(p, 40) == doctest::Approx(3.5));

    p.family = LogPoly{1.0, 2.0, 0.5, 2.0};  // 1 + 2 ln k + 0.5 k^2
    CHECK(c_k(p, 1) == doctest::Approx(1.5));
    CHECK(c_k(p, 3) == doctest::Approx(1.0 + 2.0 * std::log(3.0) + 4.5));
}

TEST_CASE("table family reads its horizon and rejects beyond it") {
    ConnectionProfile p;
    p.family = Table{{0.5, 1.5, 2.5}};
    CHECK(c_k(p, 1) == doctest::Approx(0.5));
    CHECK(c_k(p, 3) == doctest::Approx(2.5));
    CHECK_THROWS_AS(c_k(p, 4), std::invalid_argument);
}

TEST_CASE("connection probability clamps and matches the closed form") {
    ConnectionProfile p;
    p.N = 2;
    p.delta = 1.0;
    p.family = Constant{1.0};
    CHECK(connection_probability(p, 1) == doctest::Approx(0.25));  // 1/2^2
    CHECK(connection_probability(p, 3) == doctest::Approx(1.0 / 64.0));
    p.family = Constant{1e9};
    CHECK(connection_probability(p, 1) == 1.0);  // clamped
    p.family = Constant{0.0};
    CHECK(connection_probability(p, 5) == 0.0);

    // log form stays consistent deep into the lattice
    p.family = Constant{2.0};
    const double lr = log_connection_ratio(p, 700);
    CHECK(lr == doctest::Approx(std::log(2.0) - 700.0 * 2.0 * std::log(2.0)));
    CHECK(connection_probability(p, 700) == doctest::Approx(std::exp(lr)));
}

TEST_CASE("scale points k_n = floor(K n ln n)") {
    CHECK(scale_index(1.0, 1) == 0);
    CHECK(scale_index(1.0, 2) == 1);   // floor(2 ln 2) = floor(1.386)
    CHECK(scale_index(1.0, 3) == 3);   // floor(3 ln 3) = floor(3.296)
    CHECK(scale_index(1.0, 10) == 23); // floor(10 ln 10) = floor(23.026)
    CHECK(scale_index(0.5, 10) == 11);
    CHECK(scale_index(2.0, 100) == 921);
}

TEST_CASE("scale_block finds the bracketing stage") {
    for (std::uint64_t j = scale_index(1.0, 2); j <= 400; ++j) {
        const auto blk = scale_block(1.0, j);
        CHECK(blk.k_lo <= j);
        CHECK(j < blk.k_hi);
        CHECK(blk.k_lo == scale_index(1.0, blk.n));
        CHECK(blk.k_hi == scale_index(1.0, blk.n + 1));
        CHECK(blk.n >= 2);
    }
    CHECK_THROWS_AS(scale_block(1.0, 0), std::invalid_argument);
}

TEST_CASE("scaled family pins scale points and interpolates between them") {
    const double K = 1.0, C = 0.5, a = 3.0, b = 0.25;
    ScaledLog f{K, C, a, b, Interp::Lower};
    const std::uint32_t N = 2;
    for (std::uint64_t n = 2; n <= 30; ++n) {
        const std::uint64_t kn = scale_index(K, n);
        const double ln_n = std::log(static_cast<double>(n));
        const double want = C + a * ln_n * std::pow(2.0, b * ln_n);
        CHECK(c_scaled(f, N, kn) == doctest::Approx(want).epsilon(1e-12));
    }
    // between k_4 = 5 and k_5 = 8: lower holds the n=4 value, upper the n=5 one
    const double at4 = c_scaled(f, N, scale_index(K, 4));
    const double at5 = c_scaled(f, N, scale_index(K, 5));
    f.interp = Interp::Lower;
    CHECK(c_scaled(f, N, 6) == doctest::Approx(at4));
    f.interp = Interp::Upper;
    CHECK(c_scaled(f, N, 6) == doctest::Approx(at5));
    f.interp = Interp::Geometric;
    const double mid = c_scaled(f, N, 6);
    CHECK(mid > std::min(at4, at5));
    CHECK(mid < std::max(at4, at5));
    // below k_2 there is no stage to read from
    CHECK_THROWS_AS(c_scaled(f, N, 0), std::invalid_argument);
}

TEST_CASE("a_star frozen values") {
    // 25 (K ln N + K / (2K - b))
    CHECK(a_star(1.0, 1.5, 8) ==
          doctest::Approx(25.0 * (std::log(8.0) + 2.0)).epsilon(1e-14));
    CHECK(a_star(1.0, 1.5, 8) == doctest::Approx(101.98603854199589).epsilon(1e-12));
    CHECK(a_star(0.8, 1.2, 16) ==
          doctest::Approx(25.0 * (0.8 * std::log(16.0) + 2.0)).epsilon(1e-14));
    CHECK(a_star(0.8, 1.2, 16) == doctest::Approx(105.45177444479562).epsilon(1e-12));
}

TEST_CASE("a_star names the violated regime bound") {
    // K too small
    try {
        a_star(0.1, 1.5, 8);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("regime check failed") != std::string::npos);
        CHECK(std::string(e.what()).find("K") != std::string::npos);
    }
    CHECK_THROWS_AS(a_star(1.0, 0.9, 8), std::invalid_argument);   // b <= K
    CHECK_THROWS_AS(a_star(1.0, 1.99, 2), std::invalid_argument);  // b too close to 2K
}

TEST_CASE("delta must exceed -1") {
    ConnectionProfile p;
    p.N = 2;
    p.delta = -1.0;
    p.family = Constant{1.0};
    CHECK_THROWS_AS(connection_probability(p, 1), std::invalid_argument);
}
