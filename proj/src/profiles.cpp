#include "ultraperc/profiles.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ultraperc::profiles {

namespace {

constexpr std::uint64_t kIndexCap = 1ULL << 62;

// Coefficient at the n-th scale point: C + a ln(n) N^{b ln n}.
double scale_point_value(const ScaledLog& f, std::uint32_t N, double n) {
    const double ln_n = std::log(n);
    return f.C + f.a * ln_n * std::exp(f.b * ln_n * std::log(static_cast<double>(N)));
}

void require_scaled(const ScaledLog& f) {
    if (!(f.K > 0.0)) throw std::invalid_argument("scale constant K must be positive");
}

// floor(K n ln n) <= j, evaluated without the exact-range cap (search helper).
bool scale_at_most(double K, std::uint64_t n, std::uint64_t j) {
    const double nd = static_cast<double>(n);
    return std::floor(K * nd * std::log(nd)) <= static_cast<double>(j);
}

}  // namespace

std::uint64_t scale_index(double K, std::uint64_t n) {
    if (!(K > 0.0)) throw std::invalid_argument("scale constant K must be positive");
    if (n == 0) throw std::invalid_argument("scale index n must be >= 1");
    const double nd = static_cast<double>(n);
    const double v = std::floor(K * nd * std::log(nd));
    if (!(v < static_cast<double>(kIndexCap)))
        throw std::overflow_error("scale point exceeds the exact integer range (2^62)");
    return static_cast<std::uint64_t>(v);
}

ScaleBlock scale_block(double K, std::uint64_t j) {
    if (!(K > 0.0)) throw std::invalid_argument("scale constant K must be positive");
    if (j < scale_index(K, 2))
        throw std::invalid_argument("distance j lies below the first scale point k_2");
    // Doubling + binary search for the largest n with k_n <= j.
    std::uint64_t lo = 2, hi = 4;
    while (scale_at_most(K, hi, j)) {
        lo = hi;
        if (hi > (1ULL << 61)) throw std::overflow_error("scale block index overflow");
        hi *= 2;
    }
    while (lo + 1 < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (scale_at_most(K, mid, j))
            lo = mid;
        else
            hi = mid;
    }
    return ScaleBlock{lo, scale_index(K, lo), scale_index(K, lo + 1)};
}

double c_scaled(const ScaledLog& f, std::uint32_t N, std::uint64_t j) {
    require_scaled(f);
    const ScaleBlock blk = scale_block(f.K, j);
    const double n = static_cast<double>(blk.n);
    if (j == blk.k_lo) return scale_point_value(f, N, n);
    switch (f.interp) {
        case Interp::Lower:
            return scale_point_value(f, N, n);
        case Interp::Upper:
            return scale_point_value(f, N, n + 1.0);
        case Interp::Geometric: {
            const double lo = scale_point_value(f, N, n);
            const double hi = scale_point_value(f, N, n + 1.0);
            if (!(lo > 0.0) || !(hi > 0.0))
                throw std::invalid_argument(
                    "geometric interpolation needs positive scale point values");
            const double t = static_cast<double>(j - blk.k_lo) /
                             static_cast<double>(blk.k_hi - blk.k_lo);
            return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
        }
    }
    throw std::logic_error("unknown interpolation mode");
}

double c_k(const ConnectionProfile& profile, std::uint64_t k) {
    if (profile.N < 2) throw std::invalid_argument("base N must be >= 2");
    if (k == 0) throw std::invalid_argument("distance k must be >= 1");
    if (const auto* c = std::get_if<Constant>(&profile.family)) return c->c;
    if (const auto* lp = std::get_if<LogPoly>(&profile.family)) {
        const double kd = static_cast<double>(k);
        return lp->C0 + lp->C1 * std::log(kd) + lp->C2 * std::pow(kd, lp->alpha);
    }
    if (const auto* sl = std::get_if<ScaledLog>(&profile.family))
        return c_scaled(*sl, profile.N, k);
    const auto& tab = std::get<Table>(profile.family);
    if (k > tab.c.size())
        throw std::invalid_argument("distance k beyond the coefficient table horizon");
    return tab.c[k - 1];
}

double log_connection_ratio(const ConnectionProfile& profile, std::uint64_t k) {
    if (!(profile.delta > -1.0))
        throw std::invalid_argument("exponent delta must satisfy delta > -1");
    const double c = c_k(profile, k);
    if (!(c > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(c) -
           static_cast<double>(k) * (1.0 + profile.delta) * std::log(static_cast<double>(profile.N));
}

double connection_probability(const ConnectionProfile& profile, std::uint64_t k) {
    if (!(profile.delta > -1.0))
        throw std::invalid_argument("exponent delta must satisfy delta > -1");
    const double c = c_k(profile, k);
    if (!(c > 0.0)) return 0.0;
    const double expo = static_cast<double>(k) * (1.0 + profile.delta) *
                        std::log(static_cast<double>(profile.N));
    double p;
    if (expo < 500.0) {
        p = c / std::exp(expo);
    } else {
        p = std::exp(std::log(c) - expo);
    }
    if (p > 1.0) p = 1.0;
    if (p < 0.0) p = 0.0;
    return p;
}

double a_star(double K, double b, std::uint32_t N) {
    if (N < 2) throw std::invalid_argument("base N must be >= 2");
    const double lnN = std::log(static_cast<double>(N));
    std::ostringstream bad;
    if (!(K > 2.0 / lnN)) bad << "K > 2/ln N violated; ";
    if (!(K < b)) bad << "K < b violated; ";
    if (!(b < 2.0 * K - 1.0 / lnN)) bad << "b < 2K - 1/ln N violated; ";
    const std::string msg = bad.str();
    if (!msg.empty()) throw std::invalid_argument("regime check failed: " + msg);
    return 25.0 * (K * lnN + K / (2.0 * K - b));
}

}  // namespace ultraperc::profiles
