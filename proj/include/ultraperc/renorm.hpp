#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ultraperc/numeric.hpp"
#include "ultraperc/profiles.hpp"
#include "ultraperc/sampler.hpp"

namespace ultraperc::renorm {

// Good-ball rules for the coarse-grained graph.  A sub-ball at level k is
// good when its largest cluster reaches the threshold.
struct GammaGood {
    double gamma = 0.75;  // threshold N^{gamma k}
};
struct BetaGood {
    double beta = 0.25;  // threshold beta * N^k
};
using GoodBallConfig = std::variant<GammaGood, BetaGood>;

double good_threshold(const GoodBallConfig& config, std::uint32_t N,
                      std::uint32_t k);

// Coarse-grained graph on the good sub-balls of one realization.  Vertices
// are the level-`sub_level` sub-balls whose largest cluster meets the
// threshold; two good sub-balls are adjacent when a retained edge joins
// their largest clusters.
struct RenormalizedGraph {
    std::uint32_t sub_level = 0;
    std::uint64_t n_subballs = 0;
    std::uint64_t sub_points = 0;  // points per sub-ball
    double threshold = 0.0;
    std::vector<std::uint64_t> largest_size;  // per sub-ball
    std::vector<std::uint8_t> good;
    std::uint64_t n_good = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    bool connected = false;  // all good sub-balls in one component
    // Sum of the good largest-cluster sizes when connected: a floor on the
    // merged cluster inside the full ball.
    std::uint64_t merged_cluster_floor = 0;
};

RenormalizedGraph renormalized_graph(const sampler::GraphRealization& g,
                                     std::uint32_t sub_level,
                                     const GoodBallConfig& config);

// Closed-form rate for an edge between the largest clusters of two beta-good
// sibling sub-balls: beta^2 a log n / N^{(2K-b) log n}.
double r_n(double beta, double a, double K, double b, std::uint32_t N,
           std::uint64_t n);

// Worst-case exact counterpart: at least one edge among beta^2 N^{2 k_n}
// pairs, each carrying the weakest in-block probability c_{k_n}/N^{2 k_{n+1}}.
double r_n_exact(double beta, double a, double K, double b, std::uint32_t N,
                 std::uint64_t n);

struct GoodBallEstimate {
    WilsonInterval ci;
    double threshold = 0.0;
    std::uint64_t successes = 0;
};

// Monte Carlo estimate of P(largest cluster of a level-k ball >= threshold).
GoodBallEstimate good_ball_probability(const profiles::ConnectionProfile& profile,
                                       const GoodBallConfig& config,
                                       std::uint32_t k, std::uint64_t replicates,
                                       std::uint64_t seed, unsigned workers = 1);

// One stage of the density cascade: beta_{n+1} = (1 - eps_n) pG_n beta_n.
struct CascadeState {
    double K = 1.0;
    std::uint64_t n = 2;
    double k_n = 0.0;
    double beta = 0.5;
    double eps = 0.0;
    double theta = 0.1;
    double pG_hat = 1.0;
    double pA_hat = 1.0;
    bool beta_floor_ok = true;  // beta >= 1/5 so far
    bool pG_floor_ok = true;    // applied pG >= 1/2 so far
};

CascadeState make_cascade_state(double K, std::uint64_t n, double beta,
                                double theta, double pG_hat = 1.0,
                                double pA_hat = 1.0);

CascadeState cascade_advance(const CascadeState& state, double pG_hat);

// Certificate for the cascade floors: finds the smallest start n0 with
//   prod (1 - n^{-(1+theta)}),  prod pB_n,  prod pA_n  all >= (4/5)^{1/3},
// using pB_n >= 1 - exp(-(kappa/2) n^q), q = K ln N - 2(1+theta), and the
// non-connectivity bound for pA_n, then iterates the induction from
// beta = 1/2, pG = 2/3 checking beta >= 1/5 and pG >= 1/2 over the horizon.
struct Step3Report {
    double floor_target = 0.0;  // (4/5)^{1/3}
    double kappa = 0.0;
    double q = 0.0;  // K ln N - 2(1+theta)
    double s = 0.0;  // power-law exponent of the non-connectivity term
    double n0 = 0.0;
    bool floors_ok = false;
    double product_eps = 0.0;
    double product_pB = 0.0;
    double product_pA = 0.0;
    double beta_final = 0.0;
    double beta_min = 0.0;
    double pG_min = 0.0;
    bool induction_ok = false;
    std::uint64_t horizon = 0;
};

Step3Report step3_certificate(double K, double b, std::uint32_t N, double a,
                              double theta, double n0_start = 2.0,
                              std::uint64_t horizon = 64, double kappa = 0.0,
                              double M = 1.0, double L = 1.0);

// The fixed arithmetic the cascade rests on, checked literally.
struct Step3PaperNumbers {
    double floor_target = 0.0;     // (4/5)^{1/3}
    double first_step = 0.0;       // (4/5)^{1/3} * 2/3 * 1/2
    double chain = 0.0;            // (4/5)^{2/3}
    double induction_floor = 0.0;  // 1/2 * 2/3 * 4/5
    bool first_step_ok = false;    // first_step > 1/5
    bool chain_ok = false;         // chain >= 1/2
    bool induction_ok = false;     // induction_floor > 1/5
};

Step3PaperNumbers step3_paper_numbers();

// Exact finite-n probabilities next to their stated asymptotics for the
// catalog of annulus-connection events (K-scaled profile with b = 0 and
// log-coefficient a*N, delta = 1).
enum class AnnulusCase { A, B, C, D, E, F };

struct AnnulusEval {
    double exact = 0.0;
    double asymptotic = 0.0;
};

// Cases: A = ball-to-shell connection at distance k_{n+1}+j; B = no edge
// from the full (n+1)-ball to that shell; C = no connection from the full
// (n+1)-ball to the next annulus (decays like n^{-a}); D = as A but ell
// annuli further out; E = connection from the n-ball to anything beyond
// k_{n+1}; F = partial sum of the case-E values for m = 2..n.
AnnulusEval lemma51_exact_and_asymptotic(AnnulusCase which, std::uint32_t N,
                                         double K, double C, double a,
                                         std::uint64_t n, std::uint32_t j = 1,
                                         std::uint32_t ell = 1);

// Probability that a cluster of the given size in the n-th ball reaches the
// annulus two or more scale blocks out, next to M log n / n^{(Kj-b) ln N}.
struct SkipAnnulusResult {
    double exact = 0.0;
    double bound = 0.0;
};

SkipAnnulusResult skip_annulus_bound(std::uint32_t N, double K, double b,
                                     double a, double C, std::uint64_t n,
                                     std::uint32_t j, double cluster_size,
                                     double M = 1.0);

// Per-n statistics of the annulus-to-annulus connection events.  Exact mode
// returns the no-connection probabilities and their partial sums next to the
// reference sum of n^{-a/N}; sampled mode additionally draws the connection
// indicators from the exact per-event probabilities.
struct PrePercScan {
    std::vector<std::uint64_t> n_values;
    std::vector<double> p_no_connection;
    std::vector<double> partial_sums;        // of p_no_connection
    std::vector<double> reference_partials;  // of n^{-a_eff}
    double a_eff = 0.0;
    std::vector<std::uint8_t> connected_indicator;  // sampled mode only
};

PrePercScan pre_percolation_scan(const profiles::ConnectionProfile& profile,
                                 std::uint64_t n_lo, std::uint64_t n_hi,
                                 bool sampled, std::uint64_t seed);

// Reporting helpers for the non-percolation side.
double r_tilde_n(double a, double K, std::uint32_t N, std::uint64_t n);

double alpha_lambda(double lambda);  // lambda - 1 - ln lambda, lambda in (0,1)

struct GiantTailBound {
    double threshold = 0.0;  // (1+eps) ln(n_vertices) / alpha(lambda)
    double bound = 0.0;      // n_vertices^{-(1+eps)} / lambda
};

GiantTailBound er_giant_tail(double n_vertices, double lambda, double eps);

// Diagnostic evaluator for the gamma-good recursion at one stage n, with
// k_n = floor(n ln n).  eta enters only the reported delta threshold.
struct GammaStep {
    double k_n = 0.0;
    double k_np1 = 0.0;
    double M = 0.0;           // sub-ball count N^{k_{n+1}-k_n}
    double t = 0.0;           // needed good sub-balls N^{gamma (k_{n+1}-k_n)}
    double mean = 0.0;        // M p_n
    double binom_lb = 0.0;    // 1 - exp(-(M p - t)^2 / (2 M p)) when M p > t
    double bracket = 0.0;     // pairwise merge probability
    double eps_n = 0.0;
    double p_next_lb = 0.0;   // binom_lb * bracket^t
    double p_next_alt = 0.0;  // binom_lb * (1 - eps_n)
    double delta_threshold = 0.0;  // (1 - eps_n - eta) / (1 - eps_n)
};

GammaStep gamma_recursion_step(std::uint32_t N, double delta, double c,
                               double gamma, std::uint64_t n, double p_n,
                               double eta);

}  // namespace ultraperc::renorm
