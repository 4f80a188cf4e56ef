#include "ultraperc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "ultraperc/errors.hpp"
#include "ultraperc/hierarchy.hpp"
#include "ultraperc/numeric.hpp"
#include "ultraperc/rng.hpp"
#include "ultraperc/union_find.hpp"

namespace ultraperc::sampler {

namespace {

constexpr std::uint64_t kSimPointCap = 1ULL << 24;   // points per realized ball
constexpr std::uint64_t kCoupledPointCap = 1ULL << 12;
constexpr std::uint64_t kEnumPairCap = 1ULL << 26;   // full class enumeration
constexpr std::uint64_t kTieSalt = 0x5449455f53414c54ULL;
constexpr std::uint64_t kBoundarySalt = 0x424f554e44415259ULL;

std::uint64_t require_feasible_points(std::uint32_t N, std::uint32_t k,
                                      std::uint64_t cap) {
    if (N < 2) throw std::invalid_argument("base N must be >= 2");
    const double bits = static_cast<double>(k) * std::log2(static_cast<double>(N));
    if (bits > 62.0 ||
        hierarchy::ball_point_count(N, k) > cap)
        throw infeasible_scale_error(
            "ball point count exceeds the simulation cap");
    return hierarchy::ball_point_count(N, k);
}

// The t-th of the N^{m-1}(N-1) points at distance exactly m from x.
std::uint64_t partner_at_distance(std::uint64_t x, std::uint32_t m, std::uint64_t t,
                                  std::uint32_t N) {
    std::uint64_t pm1 = 1;
    for (std::uint32_t i = 1; i < m; ++i) pm1 *= N;
    const std::uint64_t dig = (x / pm1) % N;
    const std::uint64_t rest = x - x % (pm1 * N);
    std::uint64_t nd = t / pm1;
    if (nd >= dig) ++nd;
    const std::uint64_t nl = t % pm1;
    return rest + nd * pm1 + nl;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> enumerate_class_pairs(
    std::uint32_t N, std::uint32_t k, std::uint32_t m, std::uint64_t n_points) {
    const std::uint64_t partners = hierarchy::boundary_point_count(N, m);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    pairs.reserve(hierarchy::pair_count_at_distance(N, k, m));
    for (std::uint64_t x = 0; x < n_points; ++x)
        for (std::uint64_t t = 0; t < partners; ++t) {
            const std::uint64_t y = partner_at_distance(x, m, t, N);
            if (y > x) pairs.emplace_back(x, y);
        }
    return pairs;
}

void finalize_components(GraphRealization& g, UnionFind& uf) {
    constexpr std::uint32_t kUnset = 0xffffffffu;
    std::vector<std::uint32_t> root_id(g.n_points, kUnset);
    g.component.resize(g.n_points);
    g.component_size.clear();
    std::uint32_t next_id = 0;
    for (std::uint64_t i = 0; i < g.n_points; ++i) {
        const std::uint32_t r = uf.find(static_cast<std::uint32_t>(i));
        if (root_id[r] == kUnset) {
            root_id[r] = next_id++;
            g.component_size.push_back(0);
        }
        g.component[i] = root_id[r];
        ++g.component_size[root_id[r]];
    }
}

// Edges of one distance class: Binomial(P_m, p) count, then uniform distinct
// pairs.  Everything is drawn from `rng` in a fixed order, so the class is a
// pure function of its stream.
void sample_class_edges(std::uint32_t N, std::uint32_t k, std::uint32_t m,
                        std::uint64_t n_points, double p, Rng& rng,
                        std::vector<std::pair<std::uint64_t, std::uint64_t>>& out) {
    out.clear();
    if (p <= 0.0) return;
    const std::uint64_t total_pairs = hierarchy::pair_count_at_distance(N, k, m);
    const std::uint64_t count =
        p >= 1.0 ? total_pairs : rng.binomial(total_pairs, p);
    if (count == 0) return;
    if (count == total_pairs) {
        if (total_pairs > kEnumPairCap)
            throw infeasible_scale_error(
                "distance class too large to enumerate every pair");
        out = enumerate_class_pairs(N, k, m, n_points);
        return;
    }
    if (count > total_pairs / 2) {
        // Dense class: partial Fisher-Yates over the full enumeration beats
        // rejection (acceptance odds below 1/2 per draw).
        if (total_pairs > kEnumPairCap)
            throw infeasible_scale_error(
                "distance class too large to enumerate every pair");
        auto pairs = enumerate_class_pairs(N, k, m, n_points);
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t j = i + rng.below(pairs.size() - i);
            std::swap(pairs[i], pairs[j]);
        }
        pairs.resize(count);
        out = std::move(pairs);
        return;
    }
    const std::uint64_t partners = hierarchy::boundary_point_count(N, m);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    out.reserve(count);
    while (out.size() < count) {
        const std::uint64_t x = rng.below(n_points);
        const std::uint64_t t = rng.below(partners);
        const std::uint64_t y = partner_at_distance(x, m, t, N);
        const std::uint64_t a = x < y ? x : y, b = x < y ? y : x;
        const std::uint64_t key = (a << 32) | b;
        if (seen.insert(key).second) out.emplace_back(a, b);
    }
}

}  // namespace

GraphRealization realize_ball(const profiles::ConnectionProfile& profile,
                              std::uint32_t k, std::uint64_t seed,
                              std::uint64_t replicate, bool retain_edges) {
    GraphRealization g;
    g.N = profile.N;
    g.k = k;
    g.seed = seed;
    g.replicate = replicate;
    g.n_points = require_feasible_points(profile.N, k, kSimPointCap);
    g.edges_retained = retain_edges;
    if (retain_edges) g.edges_by_class.resize(k);
    UnionFind uf(g.n_points);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    for (std::uint32_t m = 1; m <= k; ++m) {
        const double p = profiles::connection_probability(profile, m);
        Rng rng = Rng::for_replicate(seed, replicate, m);
        sample_class_edges(profile.N, k, m, g.n_points, p, rng, edges);
        for (const auto& e : edges) uf.unite(e.first, e.second);
        if (retain_edges) g.edges_by_class[m - 1] = edges;
    }
    finalize_components(g, uf);
    return g;
}

std::vector<GraphRealization> realize_ball_coupled(
    const std::vector<profiles::ConnectionProfile>& profs, std::uint32_t k,
    std::uint64_t seed, std::uint64_t replicate, bool retain_edges) {
    if (profs.empty())
        throw std::invalid_argument("coupled realization needs >= 1 profile");
    const std::uint32_t N = profs.front().N;
    for (const auto& pr : profs)
        if (pr.N != N)
            throw std::invalid_argument("coupled profiles must share the base N");
    const std::uint64_t n_points = require_feasible_points(N, k, kCoupledPointCap);
    std::vector<GraphRealization> out(profs.size());
    std::vector<UnionFind> ufs;
    ufs.reserve(profs.size());
    for (std::size_t i = 0; i < profs.size(); ++i) {
        out[i].N = N;
        out[i].k = k;
        out[i].seed = seed;
        out[i].replicate = replicate;
        out[i].n_points = n_points;
        out[i].edges_retained = retain_edges;
        if (retain_edges) out[i].edges_by_class.resize(k);
        ufs.emplace_back(n_points);
    }
    for (std::uint32_t m = 1; m <= k; ++m) {
        std::vector<double> p(profs.size());
        for (std::size_t i = 0; i < profs.size(); ++i)
            p[i] = profiles::connection_probability(profs[i], m);
        Rng rng = Rng::for_replicate(seed, replicate, m);
        const std::uint64_t partners = hierarchy::boundary_point_count(N, m);
        for (std::uint64_t x = 0; x < n_points; ++x)
            for (std::uint64_t t = 0; t < partners; ++t) {
                const std::uint64_t y = partner_at_distance(x, m, t, N);
                if (y <= x) continue;
                const double u = rng.uniform01();
                for (std::size_t i = 0; i < profs.size(); ++i)
                    if (u < p[i]) {
                        ufs[i].unite(x, y);
                        if (retain_edges)
                            out[i].edges_by_class[m - 1].emplace_back(x, y);
                    }
            }
    }
    for (std::size_t i = 0; i < profs.size(); ++i)
        finalize_components(out[i], ufs[i]);
    return out;
}

ClusterSummary largest_cluster(const GraphRealization& g) {
    if (g.component_size.empty())
        throw std::invalid_argument("realization has no points");
    ClusterSummary s;
    std::uint64_t best = 0;
    for (const std::uint64_t sz : g.component_size)
        if (sz > best) best = sz;
    std::vector<std::uint32_t> winners;
    for (std::uint32_t id = 0; id < g.component_size.size(); ++id) {
        ++s.size_histogram[g.component_size[id]];
        if (g.component_size[id] == best) winners.push_back(id);
    }
    s.largest_size = best;
    s.density = static_cast<double>(best) / static_cast<double>(g.n_points);
    if (winners.size() == 1) {
        s.cluster_id = winners.front();
    } else {
        Rng tie = Rng::for_replicate(g.seed, g.replicate, kTieSalt);
        s.cluster_id = winners[tie.below(winners.size())];
    }
    return s;
}

bool clusters_connected(const GraphRealization& g,
                        const std::vector<std::uint64_t>& a,
                        const std::vector<std::uint64_t>& b) {
    if (!g.edges_retained)
        throw std::invalid_argument("realization lacks a retained edge list");
    std::unordered_set<std::uint64_t> in_a(a.begin(), a.end());
    std::unordered_set<std::uint64_t> in_b(b.begin(), b.end());
    for (const std::uint64_t x : a) {
        if (x >= g.n_points)
            throw std::invalid_argument("cluster point outside the ball");
        if (in_b.count(x))
            throw std::invalid_argument("clusters overlap");
    }
    for (const std::uint64_t x : b)
        if (x >= g.n_points)
            throw std::invalid_argument("cluster point outside the ball");
    for (const auto& cls : g.edges_by_class)
        for (const auto& e : cls) {
            const bool fa = in_a.count(e.first) > 0, fb = in_b.count(e.first) > 0;
            const bool sa = in_a.count(e.second) > 0, sb = in_b.count(e.second) > 0;
            if ((fa && sb) || (fb && sa)) return true;
        }
    return false;
}

double exact_boundary_connection_prob(const profiles::ConnectionProfile& profile,
                                      std::uint32_t k, std::uint32_t j) {
    if (j < k)
        throw std::invalid_argument("annulus level j must satisfy j >= k");
    const double lnN = std::log(static_cast<double>(profile.N));
    const double lE = (static_cast<double>(k) + j) * lnN +
                      std::log(static_cast<double>(profile.N - 1));
    double lp = profiles::log_connection_ratio(profile, j + 1);
    if (lp > 0.0) lp = 0.0;  // probability clamp at 1
    return connect_prob_from_logs(lE, lp);
}

bool boundary_connection_indicator(const profiles::ConnectionProfile& profile,
                                   std::uint32_t k, std::uint32_t j,
                                   std::uint64_t seed) {
    const double p = exact_boundary_connection_prob(profile, k, j);
    Rng rng = Rng::for_replicate(seed, 0, kBoundarySalt);
    return rng.uniform01() < p;
}

}  // namespace ultraperc::sampler
