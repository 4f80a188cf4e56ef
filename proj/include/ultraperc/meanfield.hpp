#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ultraperc::meanfield {

// Branching coefficient sequences for the infinite-base limit.
struct ConstantSeq {
    double c = 2.0;
};

// c_k = a ln(k + offset).  The default offset keeps the k=1,2 coefficients
// above the standing thresholds while preserving the large-k behaviour (the
// survival product is positive iff a > 1 either way); offset = 0 is the
// literal a ln k sequence.
struct ALogK {
    double a = 2.0;
    double offset = 4.0;
};

struct TableSeq {
    std::vector<double> c;  // c[k-1] = c_k
};

using Sequence = std::variant<ConstantSeq, ALogK, TableSeq>;

// c_k of the sequence; k >= 1.  Table reads beyond the horizon throw.
double seq_value(const Sequence& s, std::uint64_t k);

// The unique root in (0,1) of beta = 1 - exp(-lambda beta) when lambda > 1,
// else 0.  Bisection on [1e-12, 1] to absolute tolerance 1e-12.
double survival_beta(double lambda);

// beta_k = survival_beta(c_k beta_{k-1}^2) starting from beta_0 = 1, with the
// running product P_k = prod_{i<=k} beta_i.  Once some lambda_k <= 1 the
// sequence is extinct (all later beta are 0).
struct BetaSequence {
    std::vector<double> lambda;           // lambda[k-1] = c_k beta_{k-1}^2
    std::vector<double> beta;             // beta[k-1] = beta_k
    std::vector<double> partial_product;  // partial_product[k-1] = P_k
    bool extinct = false;
    std::uint64_t extinct_at = 0;  // first k with lambda_k <= 1 (0 if none)
    std::vector<std::string> warnings;
};
BetaSequence beta_sequence(const Sequence& c, std::uint64_t kmax);

// Truncated survival product with a convergence heuristic: flagged converged
// when every partial-product increment over the last 10% of the horizon is
// below tol.  Also reports the sum of (1 - beta_k) over that window, a proxy
// for how much tail mass the truncation ignores.
struct PercolationEstimate {
    double product = 0.0;
    bool converged = false;
    double tail_defect = 0.0;  // sum of (1 - beta_k) over the last 10%
    bool extinct = false;
    std::uint64_t kmax = 0;
    std::vector<std::string> warnings;
};
PercolationEstimate percolation_probability(const Sequence& c, std::uint64_t kmax,
                                            double tol);

// Partial sums of sum_k exp(-c_k) up to the horizon, with two horizon-level
// verdicts (convergence is not finitely decidable, so both are heuristics):
//   summable_at_horizon: the mass in (kmax/10, kmax] is < 0.7 of the mass in
//     (kmax/100, kmax/10] (geometric decay of decade mass);
//   cauchy_1e9: every increment over the last decade is below 1e-9 (a much
//     stricter literal cutoff, reported for reference).
struct SummabilityReport {
    std::vector<double> partial_sums;  // partial_sums[k-1] = S_k
    double total = 0.0;
    double decade_mass_last = 0.0;  // S(kmax) - S(kmax/10)
    double decade_mass_prev = 0.0;  // S(kmax/10) - S(kmax/100)
    double decade_ratio = 0.0;
    bool summable_at_horizon = false;
    bool cauchy_1e9 = false;
};
SummabilityReport exp_summability(const Sequence& c, std::uint64_t kmax);

}  // namespace ultraperc::meanfield
