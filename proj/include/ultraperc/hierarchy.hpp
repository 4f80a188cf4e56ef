#pragma once

#include <cstdint>
#include <vector>

namespace ultraperc::hierarchy {

// A lattice point: finitely many base-N coordinates, digits[i] = coordinate
// i+1.  Trailing zero coordinates are implicit (every point has finite
// support).
struct Address {
    std::uint32_t N = 2;
    std::vector<std::uint32_t> digits;
};

// Identifies a level-`level` ball by its index among same-level balls.
struct BallCoord {
    std::uint32_t level = 0;
    std::uint64_t index = 0;
};

// N^k as an exact integer; throws std::overflow_error beyond 2^62.
std::uint64_t checked_pow(std::uint32_t N, std::uint32_t k);

// Hierarchical distance: the largest coordinate where x and y differ
// (1-based), 0 if equal.
std::uint32_t distance(const Address& x, const Address& y);

// Distance between two points given by their indices within a common ball.
std::uint32_t distance_of_indices(std::uint64_t i, std::uint64_t j, std::uint32_t N);

// |B_k| = N^k.
std::uint64_t ball_point_count(std::uint32_t N, std::uint32_t k);

// Points at distance exactly k from a fixed point: N^{k-1}(N-1), k >= 1.
std::uint64_t boundary_point_count(std::uint32_t N, std::uint32_t k);

// Points x with j < d(0,x) <= l: N^l - N^j, j < l.
std::uint64_t annulus_point_count(std::uint32_t N, std::uint32_t j, std::uint32_t l);

// Unordered pairs of B_k points at distance exactly m: N^k N^{m-1}(N-1)/2.
std::uint64_t pair_count_at_distance(std::uint32_t N, std::uint32_t k, std::uint32_t m);

// Enumeration of B_k: index i < N^k <-> base-N digit vector of length k.
Address index_to_address(std::uint64_t i, std::uint32_t N, std::uint32_t k);
std::uint64_t address_to_index(const Address& a, std::uint32_t k);

// The m-ball inside B_k containing point i (as an index among the N^{k-m}
// sub-balls): floor(i / N^m).
std::uint64_t subball_index(std::uint64_t i, std::uint32_t N, std::uint32_t k, std::uint32_t m);

// Coordinatewise addition mod N (the group operation; handy for translation
// invariance checks).
Address add(const Address& x, const Address& y);

}  // namespace ultraperc::hierarchy
