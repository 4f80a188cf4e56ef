#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ultraperc {

// Disjoint sets over dense uint32 indices: union by size, path halving.
struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> comp_size;

    explicit UnionFind(std::uint64_t n) : parent(n), comp_size(n, 1) {
        for (std::uint64_t i = 0; i < n; ++i)
            parent[i] = static_cast<std::uint32_t>(i);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::uint64_t a, std::uint64_t b) {
        std::uint32_t ra = find(static_cast<std::uint32_t>(a));
        std::uint32_t rb = find(static_cast<std::uint32_t>(b));
        if (ra == rb) return false;
        if (comp_size[ra] < comp_size[rb]) std::swap(ra, rb);
        parent[rb] = ra;
        comp_size[ra] += comp_size[rb];
        return true;
    }
};

}  // namespace ultraperc
