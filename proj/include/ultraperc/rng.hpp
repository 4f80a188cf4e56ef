#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace ultraperc {

// One splitmix64 step; used only to derive engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fixed splitting function (seed, replicate, salt) -> engine seed.  All
// replicate streams in the toolkit derive from this, so a run is reproducible
// for any worker count.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t replicate,
                                        std::uint64_t salt = 0) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= replicate * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= salt * 0xda942042e4dd58b5ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b + 0x165667b19e3779f9ULL) ^ (c << 1);
}

// Deterministic random stream.  mt19937_64 output is pinned by the standard;
// every derived quantity below is computed with explicit arithmetic (no
// std::*_distribution), so identical seeds give identical draws everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t engine_seed) : eng_(engine_seed) {}

    static Rng for_replicate(std::uint64_t seed, std::uint64_t replicate,
                             std::uint64_t salt = 0) {
        return Rng(derive_stream_seed(seed, replicate, salt));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open() { return 1.0 - uniform01(); }

    // Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = eng_();
        } while (x < threshold);
        return x % n;
    }

    // Exact Binomial(n, p) sample.  Successes are visited by geometric jumps,
    // so the cost is O(n p + 1) instead of O(n); positions are tracked in
    // doubles, which is exact up to 2^53 trials and only loses a boundary
    // sliver beyond that (relevant only for astronomically small p).
    std::uint64_t binomial(std::uint64_t n, double p) {
        if (n == 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        const double lq = std::log1p(-p);  // < 0
        const double nd = static_cast<double>(n);
        std::uint64_t count = 0;
        double pos = 0.0;
        for (;;) {
            const double skip = std::floor(std::log(uniform01_open()) / lq);
            pos += skip + 1.0;
            if (!(pos <= nd)) break;
            ++count;
        }
        return count;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace ultraperc
