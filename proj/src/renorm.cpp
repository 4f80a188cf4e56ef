#include "ultraperc/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <unordered_set>
#include <variant>

#include "ultraperc/erconn.hpp"
#include "ultraperc/hierarchy.hpp"
#include "ultraperc/parallel.hpp"
#include "ultraperc/rng.hpp"
#include "ultraperc/union_find.hpp"

namespace ultraperc::renorm {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kScanSalt = 0x5052455045524353ULL;

void throw_if_bad(const std::ostringstream& bad) {
    std::string msg = bad.str();
    if (msg.empty()) return;
    msg.erase(msg.size() - 2);  // trailing "; "
    throw std::invalid_argument("regime check failed: " + msg);
}

// ln P(no edge) summed over the shells l in (lo, hi], for a point set of
// log-size lB sitting strictly inside the shells' ball.
double shell_log_sum(const profiles::ConnectionProfile& prof, double lB,
                     std::uint64_t lo, std::uint64_t hi) {
    const double lnN = std::log(static_cast<double>(prof.N));
    const double lnNm1 = std::log(static_cast<double>(prof.N) - 1.0);
    KahanSum s;
    for (std::uint64_t l = lo + 1; l <= hi; ++l) {
        const double lp = std::min(profiles::log_connection_ratio(prof, l), 0.0);
        s.add(log_no_edge_pow(lB + static_cast<double>(l - 1) * lnN + lnNm1, lp));
    }
    return s.value();
}

// Same sum over every shell beyond lo, truncated once a shell contributes
// less than 1e-18 (the per-shell mass decays geometrically).
double shell_log_sum_tail(const profiles::ConnectionProfile& prof, double lB,
                          std::uint64_t lo) {
    const double lnN = std::log(static_cast<double>(prof.N));
    const double lnNm1 = std::log(static_cast<double>(prof.N) - 1.0);
    KahanSum s;
    for (std::uint64_t l = lo + 1; l <= lo + 2000000; ++l) {
        const double lp = std::min(profiles::log_connection_ratio(prof, l), 0.0);
        const double term =
            log_no_edge_pow(lB + static_cast<double>(l - 1) * lnN + lnNm1, lp);
        s.add(term);
        if (-term < 1e-18) break;
    }
    return s.value();
}

profiles::ConnectionProfile scaled_profile(std::uint32_t N, double K, double C,
                                           double coeff, double b) {
    profiles::ConnectionProfile p;
    p.N = N;
    p.delta = 1.0;
    profiles::ScaledLog f;
    f.K = K;
    f.C = C;
    f.a = coeff;
    f.b = b;
    f.interp = profiles::Interp::Lower;
    p.family = f;
    return p;
}

double case_e_asymptotic(std::uint32_t N, double a, std::uint64_t n) {
    const double lnN = std::log(static_cast<double>(N));
    KahanSum s;
    for (std::uint32_t l = 1; l <= 400; ++l) {
        const double ne = static_cast<double>(n) + l;
        const double term = std::log(ne) / std::pow(ne, l * lnN);
        if (!(term > 0.0)) break;  // underflow
        s.add(term);
        if (term < 1e-18) break;
    }
    return a * s.value();
}

struct Step3Params {
    double theta = 0.0;
    double kappa = 0.0;
    double q = 0.0;
    double s = 0.0;
    double K1lnN = 0.0;
    double M = 1.0;
    double L = 1.0;
};

double x1_of(double n, const Step3Params& P) {
    return std::pow(n, -(1.0 + P.theta));
}

double x2_of(double n, const Step3Params& P) {
    const double e = -(P.kappa / 2.0) * std::pow(n, P.q);
    return e < -745.0 ? 0.0 : std::exp(e);
}

double x3_of(double n, const Step3Params& P) {
    const double ln_n = std::log(n);
    const double ta = std::exp(13.0 * std::log(ln_n) - P.s * ln_n);
    const double tb = std::exp(-P.K1lnN * ln_n);
    double tc = 0.0;
    const double pe = 2.0 * P.K1lnN * ln_n;
    if (pe <= 700.0) {
        const double arg = P.L * ln_n * ln_n * ln_n * std::exp(pe);
        if (arg <= 745.0) tc = std::exp(-arg);
    }
    return P.M * (ta + tb + tc);
}

// Upper bound on sum_{n >= A} f(n) for a decreasing f whose log decrement
// between doubling blocks keeps growing: block i contributes at most
// (A 2^i) f(A 2^i), and once a block is at most half the previous one the
// remainder is at most the last block again.
template <typename LnF>
double doubling_tail(double A, LnF ln_f) {
    KahanSum s;
    const double lnA = std::log(A);
    double prev_lt = kInf;
    for (int i = 0; i < 20000; ++i) {
        const double ln_n = lnA + i * kLn2;
        const double lt = ln_n + ln_f(ln_n);
        if (lt > 700.0) return kInf;
        // f is decreasing and nonnegative, so a block that underflows to
        // zero means every later block is zero as well.
        if (lt == -kInf) return s.value();
        const double term = std::exp(lt);
        s.add(term);
        const bool halving = i > 0 && lt - prev_lt <= -kLn2;
        prev_lt = lt;
        if (halving && (term <= 1e-300 || term <= 1e-12 * s.value())) {
            s.add(term);
            return s.value();
        }
    }
    return kInf;
}

double tail_x1(double A, double theta) {
    return std::pow(A, -(1.0 + theta)) + std::pow(A, -theta) / theta;
}

double tail_x2(double A, const Step3Params& P) {
    return doubling_tail(A, [&](double ln_n) {
        return -(P.kappa / 2.0) * std::exp(P.q * ln_n);
    });
}

// Integral bound on sum_{n > A} (ln n)^m n^{-s}; the integrand must already
// be decreasing at A, i.e. s ln A > m.
double log_power_integral(double A, double s, int m) {
    const double lnA = std::log(A);
    if (!(s > 1.0) || !(s * lnA > static_cast<double>(m))) return kInf;
    const double Ap = std::exp((1.0 - s) * lnA);
    double I = Ap / (s - 1.0);
    for (int j = 1; j <= m; ++j)
        I = (Ap * std::pow(lnA, j) + j * I) / (s - 1.0);
    return I;
}

double tail_x3(double A, const Step3Params& P) {
    const double lnA = std::log(A);
    const double ta = std::exp(13.0 * std::log(lnA) - P.s * lnA) +
                      log_power_integral(A, P.s, 13);
    const double tb = std::exp(-P.K1lnN * lnA) +
                      std::exp((1.0 - P.K1lnN) * lnA) / (P.K1lnN - 1.0);
    const double tc = doubling_tail(A, [&](double ln_n) {
        const double pe = 2.0 * P.K1lnN * ln_n;
        if (pe > 700.0) return -kInf;
        return -P.L * ln_n * ln_n * ln_n * std::exp(pe);
    });
    return P.M * (ta + tb + tc);
}

struct FloorEval {
    double p_eps = 0.0;
    double p_pB = 0.0;
    double p_pA = 0.0;
    bool ok = false;
};

// Lower bounds the three products over n >= A via
// prod (1 - x(n)) >= exp(-sum x(n) / (1 - x(A))), x decreasing.
FloorEval eval_floors(double A, const Step3Params& P, double target) {
    FloorEval r;
    const double xs[3] = {x1_of(A, P), x2_of(A, P), x3_of(A, P)};
    const double ts[3] = {tail_x1(A, P.theta), tail_x2(A, P), tail_x3(A, P)};
    double* out[3] = {&r.p_eps, &r.p_pB, &r.p_pA};
    for (int i = 0; i < 3; ++i)
        *out[i] = (xs[i] < 1.0 && std::isfinite(ts[i]))
                      ? std::exp(-ts[i] / (1.0 - xs[i]))
                      : 0.0;
    r.ok = r.p_eps >= target && r.p_pB >= target && r.p_pA >= target;
    return r;
}

}  // namespace

double good_threshold(const GoodBallConfig& config, std::uint32_t N,
                      std::uint32_t k) {
    if (N < 2) throw std::invalid_argument("base N must be >= 2");
    return std::visit(
        [&](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, GammaGood>) {
                if (!(c.gamma > 0.0 && c.gamma < 1.0))
                    throw std::invalid_argument("gamma must lie in (0,1)");
                return std::pow(static_cast<double>(N), c.gamma * k);
            } else {
                if (!(c.beta > 0.0 && c.beta <= 1.0))
                    throw std::invalid_argument("beta must lie in (0,1]");
                return c.beta * std::pow(static_cast<double>(N),
                                         static_cast<double>(k));
            }
        },
        config);
}

RenormalizedGraph renormalized_graph(const sampler::GraphRealization& g,
                                     std::uint32_t sub_level,
                                     const GoodBallConfig& config) {
    if (!g.edges_retained)
        throw std::invalid_argument("renormalization needs retained edges");
    if (sub_level < 1 || sub_level > g.k)
        throw std::invalid_argument("sub level must lie in [1, k]");
    RenormalizedGraph r;
    r.sub_level = sub_level;
    r.sub_points = hierarchy::ball_point_count(g.N, sub_level);
    r.n_subballs = g.n_points / r.sub_points;
    r.threshold = good_threshold(config, g.N, sub_level);

    // Edges at distance <= sub_level stay inside one sub-ball, so the
    // restricted union-find splits cleanly per sub-ball.
    UnionFind uf(g.n_points);
    for (std::uint32_t m = 1; m <= sub_level; ++m)
        for (const auto& e : g.edges_by_class[m - 1]) uf.unite(e.first, e.second);

    r.largest_size.assign(r.n_subballs, 0);
    std::vector<std::uint32_t> best_root(r.n_subballs, 0);
    for (std::uint64_t s = 0; s < r.n_subballs; ++s) {
        std::uint64_t best = 0;
        std::uint32_t broot = 0;
        const std::uint64_t base = s * r.sub_points;
        for (std::uint64_t i = base; i < base + r.sub_points; ++i) {
            const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
            if (uf.comp_size[root] > best) {
                best = uf.comp_size[root];
                broot = root;
            }
        }
        r.largest_size[s] = best;
        best_root[s] = broot;
    }

    r.good.assign(r.n_subballs, 0);
    for (std::uint64_t s = 0; s < r.n_subballs; ++s) {
        r.good[s] =
            static_cast<double>(r.largest_size[s]) >= r.threshold ? 1 : 0;
        r.n_good += r.good[s];
    }

    std::unordered_set<std::uint64_t> seen;
    for (std::uint32_t m = sub_level + 1; m <= g.k; ++m)
        for (const auto& e : g.edges_by_class[m - 1]) {
            const std::uint64_t s1 = e.first / r.sub_points;
            const std::uint64_t s2 = e.second / r.sub_points;
            if (!r.good[s1] || !r.good[s2]) continue;
            if (uf.find(static_cast<std::uint32_t>(e.first)) != best_root[s1] ||
                uf.find(static_cast<std::uint32_t>(e.second)) != best_root[s2])
                continue;
            const std::uint64_t key =
                (std::min(s1, s2) << 32) | std::max(s1, s2);
            if (seen.insert(key).second)
                r.edges.emplace_back(static_cast<std::uint32_t>(std::min(s1, s2)),
                                     static_cast<std::uint32_t>(std::max(s1, s2)));
        }
    std::sort(r.edges.begin(), r.edges.end());

    if (r.n_good > 0) {
        UnionFind ruf(r.n_subballs);
        for (const auto& e : r.edges) ruf.unite(e.first, e.second);
        bool one = true;
        std::uint32_t root0 = 0;
        bool first = true;
        for (std::uint64_t s = 0; s < r.n_subballs; ++s) {
            if (!r.good[s]) continue;
            const std::uint32_t root = ruf.find(static_cast<std::uint32_t>(s));
            if (first) {
                root0 = root;
                first = false;
            } else if (root != root0) {
                one = false;
                break;
            }
        }
        r.connected = one;
    }
    if (r.connected)
        for (std::uint64_t s = 0; s < r.n_subballs; ++s)
            if (r.good[s]) r.merged_cluster_floor += r.largest_size[s];
    return r;
}

double r_n(double beta, double a, double K, double b, std::uint32_t N,
           std::uint64_t n) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    if (!(b > 0.0 && b < 2.0 * K)) bad << "0 < b < 2K violated; ";
    if (!(beta >= 0.0 && beta < 1.0)) bad << "beta in [0,1) violated; ";
    if (!(a >= 0.0)) bad << "a >= 0 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    throw_if_bad(bad);
    const double ln_n = std::log(static_cast<double>(n));
    return beta * beta * a * ln_n *
           std::exp(-(2.0 * K - b) * ln_n * std::log(static_cast<double>(N)));
}

double r_n_exact(double beta, double a, double K, double b, std::uint32_t N,
                 std::uint64_t n) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    if (!(b > 0.0 && b < 2.0 * K)) bad << "0 < b < 2K violated; ";
    if (!(beta >= 0.0 && beta < 1.0)) bad << "beta in [0,1) violated; ";
    if (!(a >= 0.0)) bad << "a >= 0 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    throw_if_bad(bad);
    const double lnN = std::log(static_cast<double>(N));
    const double ln_n = std::log(static_cast<double>(n));
    const std::uint64_t kn = profiles::scale_index(K, n);
    const std::uint64_t kn1 = profiles::scale_index(K, n + 1);
    const double lc = std::log(a * ln_n) + b * ln_n * lnN;  // c at k_n, C = 0
    const double lp = std::min(lc - 2.0 * static_cast<double>(kn1) * lnN, 0.0);
    const double lE = 2.0 * std::log(beta) + 2.0 * static_cast<double>(kn) * lnN;
    return connect_prob_from_logs(lE, lp);
}

GoodBallEstimate good_ball_probability(const profiles::ConnectionProfile& profile,
                                       const GoodBallConfig& config,
                                       std::uint32_t k, std::uint64_t replicates,
                                       std::uint64_t seed, unsigned workers) {
    if (replicates == 0)
        throw std::invalid_argument("need at least one replicate");
    GoodBallEstimate est;
    est.threshold = good_threshold(config, profile.N, k);
    std::vector<std::uint8_t> hit(replicates, 0);
    parallel_for_index(replicates, workers, [&](std::uint64_t i) {
        const auto g = sampler::realize_ball(profile, k, seed, i, false);
        std::uint64_t best = 0;
        for (const std::uint64_t sz : g.component_size)
            if (sz > best) best = sz;
        hit[i] = static_cast<double>(best) >= est.threshold ? 1 : 0;
    });
    std::uint64_t succ = 0;
    for (const auto h : hit) succ += h;
    est.successes = succ;
    est.ci = wilson_interval(succ, replicates);
    return est;
}

CascadeState make_cascade_state(double K, std::uint64_t n, double beta,
                                double theta, double pG_hat, double pA_hat) {
    std::ostringstream bad;
    if (!(K > 0.0)) bad << "K > 0 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    if (!(beta > 0.0 && beta < 1.0)) bad << "beta in (0,1) violated; ";
    if (!(theta > 0.0)) bad << "theta > 0 violated; ";
    if (!(pG_hat > 0.0 && pG_hat <= 1.0)) bad << "pG in (0,1] violated; ";
    if (!(pA_hat >= 0.0 && pA_hat <= 1.0)) bad << "pA in [0,1] violated; ";
    throw_if_bad(bad);
    CascadeState st;
    st.K = K;
    st.n = n;
    st.beta = beta;
    st.theta = theta;
    st.pG_hat = pG_hat;
    st.pA_hat = pA_hat;
    const double nn = static_cast<double>(n);
    st.k_n = std::floor(K * nn * std::log(nn));
    st.eps = std::pow(nn, -(1.0 + theta));
    st.beta_floor_ok = beta >= 0.2;
    st.pG_floor_ok = pG_hat >= 0.5;
    return st;
}

CascadeState cascade_advance(const CascadeState& state, double pG_hat) {
    if (!(pG_hat >= 0.0 && pG_hat <= 1.0))
        throw std::invalid_argument("pG must lie in [0,1]");
    if (!(state.eps >= 0.0 && state.eps < 1.0))
        throw std::invalid_argument("state eps must lie in [0,1)");
    CascadeState next = state;
    next.n = state.n + 1;
    const double nn = static_cast<double>(next.n);
    next.k_n = std::floor(state.K * nn * std::log(nn));
    next.beta = (1.0 - state.eps) * pG_hat * state.beta;
    next.eps = std::pow(nn, -(1.0 + state.theta));
    next.pG_hat = pG_hat;
    next.beta_floor_ok = state.beta_floor_ok && next.beta >= 0.2;
    next.pG_floor_ok = state.pG_floor_ok && pG_hat >= 0.5;
    return next;
}

Step3Report step3_certificate(double K, double b, std::uint32_t N, double a,
                              double theta, double n0_start,
                              std::uint64_t horizon, double kappa, double M,
                              double L) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    const double lnN = N >= 2 ? std::log(static_cast<double>(N)) : 1.0;
    if (N >= 2) {
        if (!(K > 2.0 / lnN)) bad << "K > 2/ln N violated; ";
        if (!(K < b)) bad << "K < b violated; ";
        if (!(b < 2.0 * K - 1.0 / lnN)) bad << "b < 2K - 1/ln N violated; ";
        if (!(theta > 0.0 && theta < K * lnN / 2.0 - 1.0))
            bad << "0 < theta < K ln N / 2 - 1 violated; ";
    }
    if (!(M > 0.0)) bad << "M > 0 violated; ";
    if (!(L > 0.0)) bad << "L > 0 violated; ";
    if (!(horizon >= 1 && horizon <= 100000000ULL))
        bad << "horizon must lie in [1, 1e8]; ";
    if (std::isnan(n0_start)) bad << "n0 start must be a number; ";
    if (bad.str().empty()) {
        const double astar = profiles::a_star(K, b, N);
        if (!(a > astar)) bad << "a > a_star violated; ";
    }
    throw_if_bad(bad);

    Step3Params P;
    P.theta = theta;
    P.q = K * lnN - 2.0 * (1.0 + theta);
    P.K1lnN = (2.0 * K - b) * lnN;
    P.s = (2.0 * K - b) * lnN * (a / (25.0 * K * lnN) - 1.0);
    P.M = M;
    P.L = L;
    P.kappa = kappa > 0.0 ? kappa : erconn::chernoff_kappa(0.5).kappa;

    Step3Report rep;
    rep.floor_target = std::pow(0.8, 1.0 / 3.0);
    rep.kappa = P.kappa;
    rep.q = P.q;
    rep.s = P.s;
    rep.horizon = horizon;

    const double target = rep.floor_target;
    auto passes = [&](double A) { return eval_floors(A, P, target).ok; };
    double found = kInf;
    if (passes(2.0)) {
        found = 2.0;
    } else {
        double flo = 2.0;
        double fhi = std::max(4.0, std::floor(n0_start));
        bool got = false;
        while (fhi < 1e280) {
            if (passes(fhi)) {
                got = true;
                break;
            }
            flo = fhi;
            fhi *= 2.0;
        }
        if (got) {
            while (fhi - flo > 1.0 && fhi - flo > 1e-12 * flo) {
                const double mid = flo + (fhi - flo) / 2.0;
                if (passes(mid))
                    fhi = mid;
                else
                    flo = mid;
            }
            found = fhi < 9.0e15 ? std::ceil(fhi) : fhi;
        }
    }
    const double eval_at = std::isfinite(found) ? found : 1e280;
    const FloorEval fe = eval_floors(eval_at, P, target);
    rep.floors_ok = std::isfinite(found) && fe.ok;
    rep.n0 = found;
    rep.product_eps = fe.p_eps;
    rep.product_pB = fe.p_pB;
    rep.product_pA = fe.p_pA;

    // Induction from the fixed starting floors: beta = 1/2, pG = 2/3, then
    // pG for the next stage from the two error bounds of this stage.
    const double start =
        std::isfinite(found) ? found : std::max(2.0, std::floor(n0_start));
    double beta = 0.5;
    double pG = 2.0 / 3.0;
    double beta_min = beta;
    double pG_min = pG;
    bool ok = true;
    for (std::uint64_t i = 0; i < horizon; ++i) {
        const double n = start + static_cast<double>(i);
        const double eps = std::pow(n, -(1.0 + theta));
        if (pG < pG_min) pG_min = pG;
        ok = ok && pG >= 0.5;
        beta = (1.0 - eps) * pG * beta;
        if (beta < beta_min) beta_min = beta;
        ok = ok && beta >= 0.2;
        pG = (1.0 - x2_of(n, P)) * (1.0 - x3_of(n, P));
        if (pG < 0.0) pG = 0.0;
    }
    rep.beta_final = beta;
    rep.beta_min = beta_min;
    rep.pG_min = pG_min;
    rep.induction_ok = ok;
    return rep;
}

Step3PaperNumbers step3_paper_numbers() {
    Step3PaperNumbers r;
    r.floor_target = std::pow(0.8, 1.0 / 3.0);
    r.first_step = r.floor_target * (2.0 / 3.0) * 0.5;
    r.chain = std::pow(0.8, 2.0 / 3.0);
    r.induction_floor = 0.5 * (2.0 / 3.0) * 0.8;
    r.first_step_ok = r.first_step > 0.2;
    r.chain_ok = r.chain >= 0.5;
    r.induction_ok = r.induction_floor > 0.2;
    return r;
}

AnnulusEval lemma51_exact_and_asymptotic(AnnulusCase which, std::uint32_t N,
                                         double K, double C, double a,
                                         std::uint64_t n, std::uint32_t j,
                                         std::uint32_t ell) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    else if (!(K * std::log(static_cast<double>(N)) > 1.0))
        bad << "K ln N > 1 violated; ";
    if (!(a >= 0.0)) bad << "a >= 0 violated; ";
    if (!(C >= 0.0)) bad << "C >= 0 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    const bool needs_j = which == AnnulusCase::A || which == AnnulusCase::B ||
                         which == AnnulusCase::D;
    if (needs_j && j < 1) bad << "j >= 1 violated; ";
    if (which == AnnulusCase::D && ell < 1) bad << "ell >= 1 violated; ";
    throw_if_bad(bad);

    const auto prof = scaled_profile(N, K, C, a * N, 0.0);
    const double lnN = std::log(static_cast<double>(N));
    const double lnNm1 = std::log(static_cast<double>(N) - 1.0);
    const double nn = static_cast<double>(n);
    const std::uint64_t kn = profiles::scale_index(K, n);
    const std::uint64_t kn1 = profiles::scale_index(K, n + 1);
    AnnulusEval r;
    switch (which) {
        case AnnulusCase::A: {
            const std::uint64_t dist = kn1 + j;
            const double lE = static_cast<double>(kn) * lnN +
                              static_cast<double>(dist - 1) * lnN + lnNm1;
            const double lp =
                std::min(profiles::log_connection_ratio(prof, dist), 0.0);
            r.exact = connect_prob_from_logs(lE, lp);
            r.asymptotic = a * N * (1.0 - 1.0 / N) * std::log(nn) /
                           (std::pow(static_cast<double>(N), j) *
                            std::pow(nn, lnN));
            break;
        }
        case AnnulusCase::B: {
            const std::uint64_t dist = kn1 + j;
            const double lE = static_cast<double>(kn1) * lnN +
                              static_cast<double>(dist - 1) * lnN + lnNm1;
            const double lp =
                std::min(profiles::log_connection_ratio(prof, dist), 0.0);
            r.exact = std::exp(log_no_edge_pow(lE, lp));
            r.asymptotic = std::pow(
                nn, -a * N * (1.0 - 1.0 / N) / std::pow(static_cast<double>(N), j));
            break;
        }
        case AnnulusCase::C: {
            const std::uint64_t kn2 = profiles::scale_index(K, n + 2);
            r.exact = std::exp(
                shell_log_sum(prof, static_cast<double>(kn1) * lnN, kn1, kn2));
            r.asymptotic = std::pow(nn, -a);
            break;
        }
        case AnnulusCase::D: {
            const std::uint64_t knl = profiles::scale_index(K, n + ell);
            const std::uint64_t dist = knl + j;
            const double lE = static_cast<double>(kn) * lnN +
                              static_cast<double>(dist - 1) * lnN + lnNm1;
            const double lp =
                std::min(profiles::log_connection_ratio(prof, dist), 0.0);
            r.exact = connect_prob_from_logs(lE, lp);
            const double ne = nn + ell;
            r.asymptotic = a * N * (1.0 - 1.0 / N) * std::log(ne) /
                           (std::pow(static_cast<double>(N), j) *
                            std::pow(ne, ell * lnN));
            break;
        }
        case AnnulusCase::E: {
            r.exact = -std::expm1(
                shell_log_sum_tail(prof, static_cast<double>(kn) * lnN, kn1));
            r.asymptotic = case_e_asymptotic(N, a, n);
            break;
        }
        case AnnulusCase::F: {
            KahanSum se;
            KahanSum sa;
            for (std::uint64_t m = 2; m <= n; ++m) {
                const std::uint64_t km = profiles::scale_index(K, m);
                const std::uint64_t km1 = profiles::scale_index(K, m + 1);
                se.add(-std::expm1(shell_log_sum_tail(
                    prof, static_cast<double>(km) * lnN, km1)));
                sa.add(case_e_asymptotic(N, a, m));
            }
            r.exact = se.value();
            r.asymptotic = sa.value();
            break;
        }
    }
    return r;
}

SkipAnnulusResult skip_annulus_bound(std::uint32_t N, double K, double b,
                                     double a, double C, std::uint64_t n,
                                     std::uint32_t j, double cluster_size,
                                     double M) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    else {
        const double lnN = std::log(static_cast<double>(N));
        if (!(b > 0.0)) bad << "b > 0 violated; ";
        if (!(b < 2.0 * K - 1.0 / lnN)) bad << "b < 2K - 1/ln N violated; ";
    }
    if (j < 2) bad << "j >= 2 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    if (!(cluster_size >= 0.0)) bad << "cluster size >= 0 violated; ";
    if (!(M > 0.0)) bad << "M > 0 violated; ";
    if (!(a >= 0.0)) bad << "a >= 0 violated; ";
    if (!(C >= 0.0)) bad << "C >= 0 violated; ";
    throw_if_bad(bad);

    const auto prof = scaled_profile(N, K, C, a, b);
    const std::uint64_t lo = profiles::scale_index(K, n + j);
    const std::uint64_t hi = profiles::scale_index(K, n + j + 1);
    const double lnN = std::log(static_cast<double>(N));
    const double ln_n = std::log(static_cast<double>(n));
    SkipAnnulusResult r;
    r.exact = -std::expm1(shell_log_sum(prof, std::log(cluster_size), lo, hi));
    r.bound = M * ln_n * std::exp(-(K * j - b) * lnN * ln_n);
    return r;
}

PrePercScan pre_percolation_scan(const profiles::ConnectionProfile& profile,
                                 std::uint64_t n_lo, std::uint64_t n_hi,
                                 bool sampled, std::uint64_t seed) {
    const auto* f = std::get_if<profiles::ScaledLog>(&profile.family);
    if (!f)
        throw std::invalid_argument("the scan needs a scaled-family profile");
    if (f->b != 0.0)
        throw std::invalid_argument("the scan needs a profile with b = 0");
    if (n_lo < 2 || n_hi < n_lo)
        throw std::invalid_argument("need 2 <= n_lo <= n_hi");
    const double lnN = std::log(static_cast<double>(profile.N));
    PrePercScan out;
    out.a_eff = f->a / profile.N;
    KahanSum ps;
    KahanSum rs;
    for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
        const std::uint64_t kn = profiles::scale_index(f->K, n);
        const std::uint64_t kn1 = profiles::scale_index(f->K, n + 1);
        const std::uint64_t kn2 = profiles::scale_index(f->K, n + 2);
        // log point count of the open annulus (k_n, k_{n+1}]
        const double lB =
            static_cast<double>(kn1) * lnN +
            std::log1p(-std::exp((static_cast<double>(kn) -
                                  static_cast<double>(kn1)) *
                                 lnN));
        const double q = std::exp(shell_log_sum(profile, lB, kn1, kn2));
        out.n_values.push_back(n);
        out.p_no_connection.push_back(q);
        ps.add(q);
        out.partial_sums.push_back(ps.value());
        rs.add(std::pow(static_cast<double>(n), -out.a_eff));
        out.reference_partials.push_back(rs.value());
        if (sampled) {
            Rng rng = Rng::for_replicate(seed, n, kScanSalt);
            out.connected_indicator.push_back(rng.uniform01() < 1.0 - q ? 1 : 0);
        }
    }
    return out;
}

double r_tilde_n(double a, double K, std::uint32_t N, std::uint64_t n) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    if (!(a > 0.0)) bad << "a > 0 violated; ";
    if (!(K > 0.0)) bad << "K > 0 violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    throw_if_bad(bad);
    const double lnN = std::log(static_cast<double>(N));
    const double ln_n = std::log(static_cast<double>(n));
    const double le = std::log(a * ln_n) - (K - 2.0 / lnN) * ln_n * lnN -
                      K * ln_n * lnN;
    return std::exp(le);
}

double alpha_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("lambda must lie in (0,1)");
    return lambda - 1.0 - std::log(lambda);
}

GiantTailBound er_giant_tail(double n_vertices, double lambda, double eps) {
    if (!(n_vertices >= 2.0))
        throw std::invalid_argument("need at least 2 vertices");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    const double al = alpha_lambda(lambda);
    GiantTailBound r;
    r.threshold = (1.0 + eps) * std::log(n_vertices) / al;
    r.bound = std::exp(-(1.0 + eps) * std::log(n_vertices)) / lambda;
    return r;
}

GammaStep gamma_recursion_step(std::uint32_t N, double delta, double c,
                               double gamma, std::uint64_t n, double p_n,
                               double eta) {
    std::ostringstream bad;
    if (N < 2) bad << "N >= 2 violated; ";
    if (!(delta > -1.0)) bad << "delta > -1 violated; ";
    if (!(c > 0.0)) bad << "c > 0 violated; ";
    if (!(gamma > (1.0 + delta) / 2.0 && gamma < 1.0))
        bad << "gamma in ((1+delta)/2, 1) violated; ";
    if (n < 2) bad << "n >= 2 violated; ";
    if (!(p_n >= 0.0 && p_n <= 1.0)) bad << "p_n in [0,1] violated; ";
    if (!(eta >= 0.0 && eta < 1.0)) bad << "eta in [0,1) violated; ";
    throw_if_bad(bad);

    const double lnN = std::log(static_cast<double>(N));
    const double nn = static_cast<double>(n);
    GammaStep r;
    r.k_n = std::floor(nn * std::log(nn));
    r.k_np1 = std::floor((nn + 1.0) * std::log(nn + 1.0));
    const double dlt = r.k_np1 - r.k_n;
    if (dlt * lnN > 600.0)
        throw std::invalid_argument("scale increment too large for the diagnostic");
    r.M = std::exp(dlt * lnN);
    r.t = std::exp(gamma * dlt * lnN);
    r.mean = r.M * p_n;
    r.binom_lb =
        r.mean > r.t
            ? -std::expm1(-(r.mean - r.t) * (r.mean - r.t) / (2.0 * r.mean))
            : 0.0;
    const double lp = std::min(std::log(c) - r.k_np1 * (1.0 + delta) * lnN, 0.0);
    const double lE = 2.0 * gamma * r.k_n * lnN;
    const double lnQ = log_no_edge_pow(lE, lp);  // ln P(no merge edge)
    r.bracket = -std::expm1(lnQ);
    const double qe = (2.0 * gamma * r.k_n - (1.0 + delta) * r.k_np1) * lnN;
    const double ln_inner = -c * std::exp(qe);
    r.eps_n = connect_prob_from_logs(gamma * dlt * lnN, ln_inner);
    r.p_next_lb = r.binom_lb * std::exp(r.t * std::log1p(-std::exp(lnQ)));
    r.p_next_alt = r.binom_lb * (1.0 - r.eps_n);
    const double den = 1.0 - r.eps_n;
    r.delta_threshold = den > 0.0 ? (den - eta) / den : -kInf;
    return r;
}

}  // namespace ultraperc::renorm
