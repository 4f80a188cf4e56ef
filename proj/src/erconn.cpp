#include "ultraperc/erconn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultraperc/parallel.hpp"
#include "ultraperc/rng.hpp"

namespace ultraperc::erconn {

namespace {

double ln_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

void require_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

// Union-find over a small fixed vertex set.
struct MiniForest {
    std::vector<std::uint32_t> parent;
    explicit MiniForest(std::uint32_t n) : parent(n) {
        for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};

}  // namespace

double exact_connectivity(std::uint32_t n, double p) {
    if (n < 1 || n > 400)
        throw std::invalid_argument("exact connectivity needs 1 <= n <= 400");
    require_prob(p, "edge probability p");
    const double lq = std::log1p(-p);  // -inf when p = 1
    std::vector<double> P(n + 1, 0.0);
    P[1] = 1.0;
    for (std::uint32_t m = 2; m <= n; ++m) {
        KahanSum s;
        for (std::uint32_t k = 1; k < m; ++k) {
            if (P[k] <= 0.0) continue;
            const double cross = static_cast<double>(k) * (m - k);
            const double lt = ln_choose(m - 1, k - 1) + std::log(P[k]) + cross * lq;
            s.add(std::exp(lt));
        }
        double v = 1.0 - s.value();
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        P[m] = v;
    }
    return P[n];
}

WilsonInterval mc_connectivity(std::uint32_t n, double p, std::uint64_t replicates,
                               std::uint64_t seed, unsigned workers) {
    if (n < 1) throw std::invalid_argument("vertex count n must be >= 1");
    require_prob(p, "edge probability p");
    std::vector<unsigned char> connected(replicates, 0);
    parallel_for_index(replicates, workers, [&](std::uint64_t rep) {
        Rng rng = Rng::for_replicate(seed, rep);
        MiniForest forest(n);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < p) forest.unite(i, j);
        std::uint32_t roots = 0;
        for (std::uint32_t i = 0; i < n; ++i)
            if (forest.find(i) == i) ++roots;
        connected[rep] = roots == 1 ? 1 : 0;
    });
    std::uint64_t successes = 0;
    for (const unsigned char c : connected) successes += c;
    return wilson_interval(successes, replicates);
}

DurrettBound durrett_lower_bound(std::uint64_t n, double a) {
    if (!(a > 1.0))
        throw std::invalid_argument("invalid regime: the bound needs a > 1");
    if (n < 2) throw std::invalid_argument("the bound needs n >= 2");
    const double nd = static_cast<double>(n);
    const double ln_n = std::log(nd);
    const double aln = a * ln_n;
    double ln_t1 = std::log(14.0) + 13.0 * std::log(aln) + 13.0 * aln / nd - aln;
    DurrettBound r;
    if (ln_t1 >= 0.0) {
        // Leading factor 1 - t1 <= 0: the displayed product is vacuous here.
        if (ln_t1 > 709.0) ln_t1 = 709.0;
        r.raw = 1.0 - std::exp(ln_t1);
        r.value = 0.0;
        r.clamped = true;
        return r;
    }
    const double t1 = std::exp(ln_t1);
    const double cube = ln_n * ln_n * ln_n / 100.0;
    const double ln_raw =
        nd * (std::log1p(-t1) + std::log1p(-std::exp(-2.1 * ln_n)) +
              std::log1p(-std::exp(-2.0 * ln_n))) +
        nd * (nd - 1.0) * std::log1p(-std::exp(-cube));
    r.raw = std::exp(ln_raw);
    r.value = r.raw;
    r.clamped = false;
    return r;
}

double nonconnectivity_upper_bound(std::uint64_t n, double a, double M, double L,
                                   bool exponent13) {
    if (!(a > 1.0))
        throw std::invalid_argument("invalid regime: the bound needs a > 1");
    if (n < 2) throw std::invalid_argument("the bound needs n >= 2");
    if (!(M > 0.0) || !(L > 0.0))
        throw std::invalid_argument("constants M and L must be positive");
    const double ln_n = std::log(static_cast<double>(n));
    const double lnln = std::log(ln_n);
    const double t1 = std::exp(13.0 * lnln + (1.0 - a) * ln_n);
    const double t2 = 1.0 / static_cast<double>(n);
    const double m = exponent13 ? 13.0 : 3.0;
    const double ln_arg = std::log(L) + m * lnln + 2.0 * ln_n;
    double t3 = 0.0;
    if (ln_arg <= 700.0) {
        const double arg = std::exp(ln_arg);
        t3 = arg > 745.0 ? 0.0 : std::exp(-arg);
    }
    return M * (t1 + t2 + t3);
}

BoundConstants fit_nonconnectivity_constants(double a, std::uint64_t n_lo,
                                             std::uint64_t n_hi, bool exponent13) {
    if (n_lo < 2 || n_lo > n_hi)
        throw std::invalid_argument("fitting range needs 2 <= n_lo <= n_hi");
    BoundConstants out;
    double m_needed = 0.0;
    for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
        const double gap = 1.0 - durrett_lower_bound(n, a).value;
        const double base = nonconnectivity_upper_bound(n, a, 1.0, out.L, exponent13);
        const double need = gap / base;
        if (need > m_needed) m_needed = need;
    }
    out.M = m_needed > 1.0 ? m_needed * (1.0 + 1e-12) : 1.0;
    return out;
}

double h_rate(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("rate argument c must be positive");
    const double u = c - 1.0;
    return std::log1p(u) - u / c;
}

double binomial_tail_bound(std::uint64_t n, double q, double x, double c) {
    require_prob(q, "success probability q");
    if (!(c > 1.0)) throw std::invalid_argument("tail bound needs c > 1");
    const double floor_x = c * static_cast<double>(n) * q;
    if (!(x >= floor_x))
        throw std::invalid_argument("tail bound needs x >= c n q");
    return std::exp(-h_rate(c) * x);
}

double exact_binomial_tail(std::uint64_t n, double q, double x) {
    require_prob(q, "success probability q");
    if (x <= 0.0) return 1.0;
    const double j0d = std::ceil(x);
    if (j0d > static_cast<double>(n)) return 0.0;
    const std::uint64_t j0 = static_cast<std::uint64_t>(j0d);
    if (q <= 0.0) return j0 == 0 ? 1.0 : 0.0;
    if (q >= 1.0) return 1.0;
    const double lq = std::log(q), l1q = std::log1p(-q);
    KahanSum s;
    for (std::uint64_t j = j0; j <= n; ++j) {
        const double lt = ln_choose(n, j) + static_cast<double>(j) * lq +
                          static_cast<double>(n - j) * l1q;
        s.add(std::exp(lt));
    }
    double v = s.value();
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

KappaResult chernoff_kappa(double eps_max) {
    if (!(eps_max > 0.0 && eps_max <= 1.0))
        throw std::invalid_argument("eps_max must lie in (0,1]");
    const auto ratio = [](double u) { return h_rate(1.0 + u) / (u * u); };
    // Dense scan, then ternary refinement around the best point.  The ratio
    // decreases toward eps_max for this h, but the scan keeps the result
    // honest without relying on that.
    const int grid = 4096;
    double best_u = eps_max, best = ratio(eps_max);
    for (int i = 1; i < grid; ++i) {
        const double u = eps_max * static_cast<double>(i) / grid;
        const double v = ratio(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    double lo = best_u - eps_max / grid, hi = best_u + eps_max / grid;
    if (lo <= 0.0) lo = eps_max / (grid * 4.0);
    if (hi > eps_max) hi = eps_max;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (ratio(m1) < ratio(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double refined = ratio(0.5 * (lo + hi));
    KappaResult r;
    r.kappa = refined < best ? refined : best;
    r.eps = eps_max;
    return r;
}

Cor53Result cor53_bound(std::uint64_t n, double p, double sigma,
                        const KappaResult& kappa) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("probability p must lie in (0,1)");
    const double cap = std::min(p / (1.0 - p), kappa.eps);
    if (!(sigma > 0.0 && sigma < cap))
        throw std::invalid_argument("sigma must lie in (0, min(p/(1-p), eps))");
    Cor53Result r;
    r.bound = std::exp(-kappa.kappa * sigma * sigma * (1.0 - p) *
                       static_cast<double>(n));
    const double threshold = static_cast<double>(n) * (1.0 - p) * (1.0 + sigma);
    r.exact = exact_binomial_tail(n, 1.0 - p, threshold);
    return r;
}

}  // namespace ultraperc::erconn
