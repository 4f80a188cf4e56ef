#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ultraperc/profiles.hpp"

namespace ultraperc::sampler {

// One sampled graph on the N^k points of a k-ball, with finished components.
// Component ids are assigned by first point occurrence (index order), so the
// whole object is a pure function of (profile, k, seed, replicate).
struct GraphRealization {
    std::uint32_t N = 2;
    std::uint32_t k = 0;
    std::uint64_t n_points = 0;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::vector<std::uint32_t> component;       // point index -> component id
    std::vector<std::uint64_t> component_size;  // component id -> size
    bool edges_retained = false;
    // edges_by_class[m-1] = sampled distance-m edges as (smaller, larger).
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> edges_by_class;
};

struct ClusterSummary {
    std::uint64_t largest_size = 0;
    double density = 0.0;  // largest_size / N^k
    std::uint32_t cluster_id = 0;
    std::map<std::uint64_t, std::uint64_t> size_histogram;  // size -> count
};

// Samples the graph restricted to a k-ball: per distance class m the edge
// count is Binomial(pair_count_at_distance(N,k,m), p_(m)) and the edges are
// uniform distinct distance-m pairs.  Throws infeasible_scale_error when N^k
// exceeds the simulation cap (2^24 points).
GraphRealization realize_ball(const profiles::ConnectionProfile& profile,
                              std::uint32_t k, std::uint64_t seed,
                              std::uint64_t replicate, bool retain_edges = false);

// Same distance-class streams shared across all profiles (which must agree on
// N): class m uses one uniform per enumerated pair and keeps the edge in
// realization i iff u < p_i(m).  This is the monotone threshold coupling, so
// pointwise larger profiles yield supersets of edges.  Full pair enumeration;
// capped at N^k <= 2^12 points.
std::vector<GraphRealization> realize_ball_coupled(
    const std::vector<profiles::ConnectionProfile>& profs, std::uint32_t k,
    std::uint64_t seed, std::uint64_t replicate, bool retain_edges = false);

// Largest component; ties are broken by a uniform draw from a stream derived
// from (seed, replicate), making the choice reproducible.
ClusterSummary largest_cluster(const GraphRealization& g);

// True iff some retained edge joins a point of A to a point of B.  A and B
// must be disjoint point sets inside the realized ball.
bool clusters_connected(const GraphRealization& g,
                        const std::vector<std::uint64_t>& a,
                        const std::vector<std::uint64_t>& b);

// P(the k-ball has at least one edge into the (j,j+1]-annulus around it)
//   = 1 - (1 - p_(j+1))^{N^k N^j (N-1)},   j >= k,
// evaluated in the log domain, and a Bernoulli draw of that indicator.
double exact_boundary_connection_prob(const profiles::ConnectionProfile& profile,
                                      std::uint32_t k, std::uint32_t j);
bool boundary_connection_indicator(const profiles::ConnectionProfile& profile,
                                   std::uint32_t k, std::uint32_t j,
                                   std::uint64_t seed);

}  // namespace ultraperc::sampler
