#pragma once

#include <cstdint>

#include "ultraperc/numeric.hpp"

namespace ultraperc::erconn {

// P(G(n,p) is connected), by the classic recursion over the component of a
// fixed vertex: P(n) = 1 - sum_{k<n} C(n-1,k-1) P(k) (1-p)^{k(n-k)}.
// Limited to n <= 400; beyond that the alternating accumulation loses digits.
double exact_connectivity(std::uint32_t n, double p);

// Monte Carlo connectivity frequency with a Wilson 95% interval.  Replicate i
// draws from a stream derived from (seed, i), so the estimate is identical
// for every worker count.
WilsonInterval mc_connectivity(std::uint32_t n, double p, std::uint64_t replicates,
                               std::uint64_t seed, unsigned workers = 1);

// Closed-form lower bound on P(G(n, a ln n / n) connected) for a > 1:
//   [(1 - 14(a ln n)^13 e^{13 a ln n / n} / n^a)(1 - n^-2.1)(1 - n^-2)]^n
//   * (1 - e^{-(ln n)^3 / 100})^{n(n-1)}.
// The leading factor is negative for small n; then `raw` keeps the negative
// first factor, `value` clamps to 0 and `clamped` is set.
struct DurrettBound {
    double value = 0.0;
    double raw = 0.0;
    bool clamped = false;
};
DurrettBound durrett_lower_bound(std::uint64_t n, double a);

// Companion upper bound on the non-connectivity probability:
//   M [ (ln n)^13 n^{1-a} + 1/n + exp(-L (ln n)^m n^2) ],
// with m = 13 when exponent13 is set and m = 3 otherwise (the source text
// shows both exponents; the flag exposes the two readings).
double nonconnectivity_upper_bound(std::uint64_t n, double a, double M, double L,
                                   bool exponent13);

// Smallest M (at L = 1) with 1 - durrett_lower_bound <= the upper bound for
// every n in [n_lo, n_hi].
struct BoundConstants {
    double M = 1.0;
    double L = 1.0;
};
BoundConstants fit_nonconnectivity_constants(double a, std::uint64_t n_lo,
                                             std::uint64_t n_hi, bool exponent13);

// h(c) = ln c - 1 + 1/c, the binomial large-deviation rate; c > 0.
double h_rate(double c);

// e^{-h(c) x}, an upper bound on P(Bin(n,q) >= x) valid for c > 1 and
// x >= c n q (rejected otherwise).
double binomial_tail_bound(std::uint64_t n, double q, double x, double c);

// P(Bin(n,q) >= x) by direct log-domain summation.
double exact_binomial_tail(std::uint64_t n, double q, double x);

// The largest kappa with h(1+u) >= kappa u^2 on (0, eps_max], i.e. the
// minimum of h(1+u)/u^2 there (the ratio tends to 1/2 as u -> 0).
struct KappaResult {
    double kappa = 0.0;
    double eps = 0.0;
};
KappaResult chernoff_kappa(double eps_max);

// Lower-deviation bound e^{-kappa sigma^2 (1-p) n} for the event
// 1 - Y_n/n <= p - sigma(1-p), Y_n ~ Bin(n, 1-p), plus the exact probability
// of that event for comparison.  Requires 0 < sigma < min(p/(1-p), eps).
struct Cor53Result {
    double bound = 0.0;
    double exact = 0.0;
};
Cor53Result cor53_bound(std::uint64_t n, double p, double sigma,
                        const KappaResult& kappa);

}  // namespace ultraperc::erconn
