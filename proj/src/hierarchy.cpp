#include "ultraperc/hierarchy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ultraperc::hierarchy {

namespace {

constexpr std::uint64_t kPowCap = 1ULL << 62;

void require_base(std::uint32_t N) {
    if (N < 2) throw std::invalid_argument("base N must be >= 2");
}

// a*b with overflow detection against the 2^62 exact-arithmetic cap.
std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > kPowCap)
        throw std::overflow_error("count exceeds the exact integer range (2^62)");
    return static_cast<std::uint64_t>(r);
}

}  // namespace

std::uint64_t checked_pow(std::uint32_t N, std::uint32_t k) {
    require_base(N);
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < k; ++i) r = mul_checked(r, N);
    return r;
}

std::uint32_t distance(const Address& x, const Address& y) {
    if (x.N != y.N) throw std::invalid_argument("addresses have different bases");
    require_base(x.N);
    const std::size_t nx = x.digits.size(), ny = y.digits.size();
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < std::max(nx, ny); ++i) {
        const std::uint32_t xi = i < nx ? x.digits[i] : 0;
        const std::uint32_t yi = i < ny ? y.digits[i] : 0;
        if (xi >= x.N || yi >= x.N)
            throw std::invalid_argument("digit out of range for base N");
        if (xi != yi) d = static_cast<std::uint32_t>(i + 1);
    }
    return d;
}

std::uint32_t distance_of_indices(std::uint64_t i, std::uint64_t j, std::uint32_t N) {
    require_base(N);
    std::uint32_t d = 0, pos = 0;
    while (i != 0 || j != 0) {
        ++pos;
        if (i % N != j % N) d = pos;
        i /= N;
        j /= N;
    }
    return d;
}

std::uint64_t ball_point_count(std::uint32_t N, std::uint32_t k) {
    return checked_pow(N, k);
}

std::uint64_t boundary_point_count(std::uint32_t N, std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("boundary shell needs k >= 1");
    return mul_checked(checked_pow(N, k - 1), N - 1);
}

std::uint64_t annulus_point_count(std::uint32_t N, std::uint32_t j, std::uint32_t l) {
    if (!(j < l)) throw std::invalid_argument("annulus needs j < l");
    return checked_pow(N, l) - checked_pow(N, j);
}

std::uint64_t pair_count_at_distance(std::uint32_t N, std::uint32_t k, std::uint32_t m) {
    if (m < 1 || m > k)
        throw std::invalid_argument("distance class m must satisfy 1 <= m <= k");
    // N^k * N^{m-1} * (N-1) is always even, so the division is exact.
    unsigned __int128 r = static_cast<unsigned __int128>(checked_pow(N, k));
    r *= checked_pow(N, m - 1);
    r *= (N - 1);
    r /= 2;
    if (r > kPowCap)
        throw std::overflow_error("count exceeds the exact integer range (2^62)");
    return static_cast<std::uint64_t>(r);
}

Address index_to_address(std::uint64_t i, std::uint32_t N, std::uint32_t k) {
    const std::uint64_t total = checked_pow(N, k);
    if (i >= total) throw std::invalid_argument("point index out of range for B_k");
    Address a;
    a.N = N;
    a.digits.resize(k);
    for (std::uint32_t pos = 0; pos < k; ++pos) {
        a.digits[pos] = static_cast<std::uint32_t>(i % N);
        i /= N;
    }
    return a;
}

std::uint64_t address_to_index(const Address& a, std::uint32_t k) {
    require_base(a.N);
    if (a.digits.size() > k) {
        for (std::size_t i = k; i < a.digits.size(); ++i)
            if (a.digits[i] != 0)
                throw std::invalid_argument("address does not lie in B_k");
    }
    std::uint64_t idx = 0;
    const std::uint64_t unit = 1;
    std::uint64_t scale = unit;
    for (std::uint32_t pos = 0; pos < k; ++pos) {
        const std::uint32_t d = pos < a.digits.size() ? a.digits[pos] : 0;
        if (d >= a.N) throw std::invalid_argument("digit out of range for base N");
        idx += scale * d;
        if (pos + 1 < k) scale *= a.N;
    }
    return idx;
}

std::uint64_t subball_index(std::uint64_t i, std::uint32_t N, std::uint32_t k, std::uint32_t m) {
    if (m > k) throw std::invalid_argument("sub-ball level m must satisfy m <= k");
    const std::uint64_t total = checked_pow(N, k);
    if (i >= total) throw std::invalid_argument("point index out of range for B_k");
    return i / checked_pow(N, m);
}

Address add(const Address& x, const Address& y) {
    if (x.N != y.N) throw std::invalid_argument("addresses have different bases");
    require_base(x.N);
    Address r;
    r.N = x.N;
    r.digits.resize(std::max(x.digits.size(), y.digits.size()));
    for (std::size_t i = 0; i < r.digits.size(); ++i) {
        const std::uint32_t xi = i < x.digits.size() ? x.digits[i] : 0;
        const std::uint32_t yi = i < y.digits.size() ? y.digits[i] : 0;
        if (xi >= x.N || yi >= x.N)
            throw std::invalid_argument("digit out of range for base N");
        r.digits[i] = (xi + yi) % x.N;
    }
    return r;
}

}  // namespace ultraperc::hierarchy
