#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ultraperc {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(-log1p(-e^lp)) for lp = log p < 0, i.e. the log of -log(1-p) without
// forming p when it would underflow.  For tiny p, -log(1-p) = p(1 + p/2 + ...).
inline double log_neg_log1p_exp(double lp) {
    if (lp >= 0.0) return std::numeric_limits<double>::infinity();  // p >= 1
    if (lp > -37.0) {
        const double p = std::exp(lp);
        return std::log(-std::log1p(-p));
    }
    return lp;  // correction p/2 is below double resolution here
}

// log of (1-p)^E for p = e^lp, E = e^lE (a "no edge among E independent
// pairs" probability).  Returns a value in [-inf, 0].
inline double log_no_edge_pow(double lE, double lp) {
    if (!(lE > kNegInf)) return 0.0;  // E = 0 pairs
    if (lp >= 0.0) return kNegInf;    // p = 1
    const double a = lE + log_neg_log1p_exp(lp);
    if (a > 709.0) return kNegInf;
    return -std::exp(a);
}

// 1 - (1-p)^E computed from the logs of E and p.
inline double connect_prob_from_logs(double lE, double lp) {
    return -std::expm1(log_no_edge_pow(lE, lp));
}

// Kahan compensated accumulator.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Wilson 95% score interval for a Bernoulli frequency.
struct WilsonInterval {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t replicates = 0;
};

inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n) {
    WilsonInterval w;
    w.replicates = n;
    if (n == 0) return w;
    const double z = 1.959963984540054;  // 95%
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = phat + z2 / (2.0 * nn);
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
    w.estimate = phat;
    w.lo = (center - half) / denom;
    w.hi = (center + half) / denom;
    if (w.lo < 0.0) w.lo = 0.0;
    if (w.hi > 1.0) w.hi = 1.0;
    return w;
}

}  // namespace ultraperc
