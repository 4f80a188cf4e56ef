#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ultraperc/hierarchy.hpp"

using namespace ultraperc::hierarchy;

TEST_CASE("checked_pow exact values and overflow guard") {
    CHECK(checked_pow(2, 0) == 1);
    CHECK(checked_pow(2, 10) == 1024);
    CHECK(checked_pow(3, 4) == 81);
    CHECK(checked_pow(10, 18) == 1000000000000000000ULL);
    CHECK(checked_pow(2, 62) == (1ULL << 62));
    CHECK_THROWS_AS(checked_pow(2, 63), std::overflow_error);
    CHECK_THROWS_AS(checked_pow(10, 19), std::overflow_error);
}

TEST_CASE("distance is an ultrametric on the 3-ball with N=2") {
    // exhaustive check over all 8 points
    const std::uint32_t N = 2, k = 3;
    std::vector<Address> pts;
    for (std::uint64_t i = 0; i < 8; ++i) pts.push_back(index_to_address(i, N, k));
    for (std::size_t x = 0; x < 8; ++x) {
        CHECK(distance(pts[x], pts[x]) == 0);
        for (std::size_t y = 0; y < 8; ++y) {
            const auto dxy = distance(pts[x], pts[y]);
            CHECK(dxy == distance(pts[y], pts[x]));
            if (x != y) CHECK(dxy >= 1);
            for (std::size_t z = 0; z < 8; ++z) {
                const auto dxz = distance(pts[x], pts[z]);
                const auto dyz = distance(pts[y], pts[z]);
                CHECK(dxz <= (dxy > dyz ? dxy : dyz));
            }
        }
    }
}

TEST_CASE("distance_of_indices agrees with the address form") {
    const std::uint32_t N = 3, k = 3;
    for (std::uint64_t i = 0; i < 27; ++i) {
        for (std::uint64_t j = 0; j < 27; ++j) {
            const auto a = index_to_address(i, N, k);
            const auto b = index_to_address(j, N, k);
            CHECK(distance_of_indices(i, j, N) == distance(a, b));
        }
    }
}

TEST_CASE("ball, boundary and annulus counts") {
    CHECK(ball_point_count(2, 10) == 1024);
    CHECK(ball_point_count(5, 0) == 1);
    CHECK(boundary_point_count(3, 2) == 6);   // 3^1 * 2
    CHECK(boundary_point_count(2, 1) == 1);
    CHECK(annulus_point_count(2, 3, 5) == 24);  // 32 - 8
    CHECK_THROWS_AS(annulus_point_count(2, 5, 5), std::invalid_argument);
}

TEST_CASE("pair_count_at_distance matches brute-force enumeration") {
    for (std::uint32_t N : {2u, 3u}) {
        const std::uint32_t k = (N == 2) ? 4 : 3;
        const std::uint64_t n = ball_point_count(N, k);
        std::vector<std::uint64_t> counts(k + 1, 0);
        for (std::uint64_t i = 0; i < n; ++i)
            for (std::uint64_t j = i + 1; j < n; ++j)
                counts[distance_of_indices(i, j, N)] += 1;
        for (std::uint32_t m = 1; m <= k; ++m)
            CHECK(pair_count_at_distance(N, k, m) == counts[m]);
    }
}

TEST_CASE("index and address round trip") {
    const std::uint32_t N = 4, k = 5;
    for (std::uint64_t i = 0; i < ball_point_count(N, k); i += 7) {
        const auto a = index_to_address(i, N, k);
        CHECK(address_to_index(a, k) == i);
        CHECK(a.digits.size() == k);
    }
}

TEST_CASE("subball_index is the digit prefix") {
    const std::uint32_t N = 3, k = 4;
    for (std::uint64_t i = 0; i < ball_point_count(N, k); ++i) {
        for (std::uint32_t m = 0; m <= k; ++m) {
            CHECK(subball_index(i, N, k, m) == i / checked_pow(N, m));
        }
    }
    // points in the same m-sub-ball are exactly those at distance <= m
    for (std::uint64_t i = 0; i < 81; ++i)
        for (std::uint64_t j = 0; j < 81; ++j) {
            const bool same2 = subball_index(i, N, k, 2) == subball_index(j, N, k, 2);
            CHECK(same2 == (distance_of_indices(i, j, N) <= 2));
        }
}

TEST_CASE("group addition is translation invariant for the distance") {
    const std::uint32_t N = 3, k = 3;
    const auto t = index_to_address(17, N, k);
    for (std::uint64_t i = 0; i < 27; i += 2)
        for (std::uint64_t j = 0; j < 27; j += 3) {
            const auto a = index_to_address(i, N, k);
            const auto b = index_to_address(j, N, k);
            CHECK(distance(add(a, t), add(b, t)) == distance(a, b));
        }
}
