#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace ultraperc::profiles {

// How c_j is defined between consecutive scale points k_n < j < k_{n+1} of a
// scaled family (at the scale points themselves the value is pinned).
enum class Interp { Lower, Upper, Geometric };

// c_k = c for all k.
struct Constant {
    double c = 1.0;
};

// c_k = C0 + C1 ln k + C2 k^alpha.
struct LogPoly {
    double C0 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double alpha = 0.0;
};

// Scale sequence k_n = floor(K n ln n); at j = k_n the coefficient is
// C + a ln(n) N^{b ln n}, and between scale points it follows `interp`.
struct ScaledLog {
    double K = 1.0;
    double C = 0.0;
    double a = 1.0;
    double b = 0.0;
    Interp interp = Interp::Lower;
};

// Explicit finite horizon: c[k-1] = c_k.
struct Table {
    std::vector<double> c;
};

using CkFamily = std::variant<Constant, LogPoly, ScaledLog, Table>;

// Edge probability model: independent edges, each distance-k pair open with
// probability min(c_k / N^{k(1+delta)}, 1), delta > -1.
struct ConnectionProfile {
    std::uint32_t N = 2;
    double delta = 0.0;
    CkFamily family = Constant{1.0};
};

// Scale point k_n = floor(K n ln n); k_1 = 0.
std::uint64_t scale_index(double K, std::uint64_t n);

// The block [k_n, k_{n+1}) containing j (largest n >= 2 with k_n <= j).
// Requires j >= k_2.
struct ScaleBlock {
    std::uint64_t n = 0;
    std::uint64_t k_lo = 0;  // k_n
    std::uint64_t k_hi = 0;  // k_{n+1}
};
ScaleBlock scale_block(double K, std::uint64_t j);

// The coefficient at distance j for a scaled family (j >= k_2).
double c_scaled(const ScaledLog& f, std::uint32_t N, std::uint64_t j);

// c_k for any family; k >= 1.
double c_k(const ConnectionProfile& profile, std::uint64_t k);

// ln of the unclamped ratio c_k / N^{k(1+delta)}; +inf never, -inf when c_k <= 0.
double log_connection_ratio(const ConnectionProfile& profile, std::uint64_t k);

// min(c_k / N^{k(1+delta)}, 1), evaluated in the log domain once the direct
// power would overflow.  Clamped to [0, 1].
double connection_probability(const ConnectionProfile& profile, std::uint64_t k);

// Connectivity budget threshold 25(K ln N + K/(2K-b)); inputs must satisfy
// 2/ln N < K < b < 2K - 1/ln N (violations reported by name).
double a_star(double K, double b, std::uint32_t N);

}  // namespace ultraperc::profiles
