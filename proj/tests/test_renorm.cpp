#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultraperc/profiles.hpp"
#include "ultraperc/renorm.hpp"
#include "ultraperc/sampler.hpp"

using namespace ultraperc;
using namespace ultraperc::renorm;

namespace {

profiles::ConnectionProfile constant_profile(std::uint32_t N, double c, double delta) {
    profiles::ConnectionProfile p;
    p.N = N;
    p.delta = delta;
    p.family = profiles::Constant{c};
    return p;
}

}  // namespace

TEST_CASE("good thresholds") {
    CHECK(good_threshold(GammaGood{0.75}, 2, 8) == doctest::Approx(64.0));
    CHECK(good_threshold(BetaGood{0.3}, 2, 4) == doctest::Approx(4.8));
    CHECK_THROWS_AS(good_threshold(GammaGood{1.5}, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(good_threshold(BetaGood{0.0}, 2, 4), std::invalid_argument);
}

TEST_CASE("renormalized graph of the complete realization") {
    const auto g = sampler::realize_ball(constant_profile(2, 1e9, 0.0), 4, 3, 0, true);
    const auto rg = renormalized_graph(g, 2, BetaGood{1.0});
    CHECK(rg.n_subballs == 4);
    CHECK(rg.sub_points == 4);
    CHECK(rg.threshold == doctest::Approx(4.0));
    CHECK(rg.n_good == 4);
    for (const auto s : rg.largest_size) CHECK(s == 4);
    CHECK(rg.connected);
    CHECK(rg.merged_cluster_floor == 16);
    REQUIRE(rg.edges.size() == 6);  // every pair of good sub-balls is joined
}

TEST_CASE("renormalized graph of the empty realization") {
    const auto g = sampler::realize_ball(constant_profile(2, 0.0, 1.0), 4, 3, 0, true);
    const auto rg = renormalized_graph(g, 2, BetaGood{0.5});
    CHECK(rg.n_good == 0);  // singletons of size 1 < 2
    CHECK_FALSE(rg.connected);
    CHECK(rg.merged_cluster_floor == 0);
    CHECK(rg.edges.empty());
    // but a threshold at one point makes everything good and nothing adjacent
    const auto rg1 = renormalized_graph(g, 2, BetaGood{0.25});
    CHECK(rg1.n_good == 4);
    CHECK_FALSE(rg1.connected);
}

TEST_CASE("a connected renormalized graph floors the true largest cluster") {
    const auto profile = constant_profile(2, 4.0, 0.5);
    std::uint64_t connected_seen = 0;
    for (std::uint64_t rep = 0; rep < 60; ++rep) {
        const auto g = sampler::realize_ball(profile, 6, 2718, rep, true);
        const auto rg = renormalized_graph(g, 2, BetaGood{0.25});
        std::uint64_t best = 0;
        for (const auto s : g.component_size)
            if (s > best) best = s;
        if (rg.connected && rg.n_good > 0) {
            ++connected_seen;
            CHECK(best >= rg.merged_cluster_floor);
            CHECK(rg.merged_cluster_floor > 0);
        }
    }
    CHECK(connected_seen > 0);  // the regime is dense enough to exercise the claim
}

TEST_CASE("renormalized graph input validation") {
    const auto bare = sampler::realize_ball(constant_profile(2, 1.0, 0.5), 4, 3, 0, false);
    CHECK_THROWS_AS(renormalized_graph(bare, 2, BetaGood{0.5}), std::invalid_argument);
    const auto g = sampler::realize_ball(constant_profile(2, 1.0, 0.5), 4, 3, 0, true);
    CHECK_THROWS_AS(renormalized_graph(g, 0, BetaGood{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(renormalized_graph(g, 5, BetaGood{0.5}), std::invalid_argument);
}

TEST_CASE("closed-form sibling connection rate") {
    // beta^2 a ln n / N^{(2K-b) ln n}
    const double v = r_n(0.2, 30.0, 1.0, 1.5, 8, 10);
    const double want = 0.04 * 30.0 * std::log(10.0) *
                        std::pow(8.0, -0.5 * std::log(10.0));
    CHECK(v == doctest::Approx(want).epsilon(1e-12));
    CHECK(v == doctest::Approx(0.2521599814768969).epsilon(1e-12));
    CHECK_THROWS_AS(r_n(0.2, 30.0, 1.0, 2.5, 8, 10), std::invalid_argument);
    CHECK_THROWS_AS(r_n(1.2, 30.0, 1.0, 1.5, 8, 10), std::invalid_argument);

    // the floored counterpart is a probability; the integer scale points make
    // it jump around the smooth rate, so only pin one value
    for (std::uint64_t n = 4; n <= 14; ++n) {
        const double e = r_n_exact(0.2, 30.0, 1.0, 1.5, 8, n);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
    CHECK(r_n_exact(0.2, 30.0, 1.0, 1.5, 8, 10) ==
          doctest::Approx(0.013772455238178246).epsilon(1e-10));
}

TEST_CASE("good-ball probability estimates and determinism") {
    const auto profile = constant_profile(2, 2.0, 0.5);
    // a threshold below one point is hit by every realization
    const auto sure = good_ball_probability(profile, BetaGood{1e-9}, 3, 200, 7);
    CHECK(sure.successes == 200);
    CHECK(sure.ci.estimate == doctest::Approx(1.0));
    // the full graph always reaches beta = 1
    const auto full = good_ball_probability(constant_profile(2, 1e9, 0.0),
                                            BetaGood{1.0}, 3, 100, 7);
    CHECK(full.successes == 100);
    // workers do not change the estimate
    const auto w1 = good_ball_probability(profile, BetaGood{0.5}, 5, 400, 11, 1);
    const auto w3 = good_ball_probability(profile, BetaGood{0.5}, 5, 400, 11, 3);
    CHECK(w1.successes == w3.successes);
    CHECK(w1.ci.estimate == w3.ci.estimate);
    // interval width shrinks like 1/sqrt(replicates)
    const auto small = good_ball_probability(profile, BetaGood{0.5}, 5, 100, 13);
    const auto large = good_ball_probability(profile, BetaGood{0.5}, 5, 10000, 13);
    const double ws = small.ci.hi - small.ci.lo;
    const double wl = large.ci.hi - large.ci.lo;
    CHECK(ws > 3.0 * wl);
}

TEST_CASE("good-ball estimate agrees with an independent replicate loop") {
    const auto profile = constant_profile(2, 12.0, 1.0);
    const GoodBallConfig cfg = BetaGood{0.3};
    const std::uint64_t reps = 400;
    const auto est = good_ball_probability(profile, cfg, 8, reps, 99);
    const double threshold = good_threshold(cfg, 2, 8);
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto s = sampler::largest_cluster(sampler::realize_ball(profile, 8, 99, r));
        if (static_cast<double>(s.largest_size) >= threshold) ++hits;
    }
    CHECK(est.successes == hits);  // same streams, same verdicts
    CHECK(est.threshold == doctest::Approx(threshold));
}

TEST_CASE("cascade stages") {
    const auto st = make_cascade_state(1.0, 10, 0.3, 0.1);
    CHECK(st.k_n == doctest::Approx(23.0));
    CHECK(st.eps == doctest::Approx(std::pow(10.0, -1.1)).epsilon(1e-12));
    CHECK(st.beta_floor_ok);

    const auto next = cascade_advance(st, 1.0);
    CHECK(next.n == 11);
    CHECK(next.beta == doctest::Approx((1.0 - st.eps) * 0.3).epsilon(1e-12));
    CHECK(next.beta_floor_ok);
    CHECK(next.pG_floor_ok);

    // a weak stage trips the floor flags and they stay tripped
    const auto bad = cascade_advance(st, 0.4);
    CHECK_FALSE(bad.pG_floor_ok);
    const auto after = cascade_advance(bad, 0.9);
    CHECK_FALSE(after.pG_floor_ok);

    // beta decays below 1/5 eventually without good stages
    auto s2 = make_cascade_state(1.0, 2, 0.21, 0.1);
    auto s3 = cascade_advance(s2, 0.7);
    CHECK_FALSE(s3.beta_floor_ok);

    // eps = 0 with a perfect stage preserves beta exactly
    auto hold = make_cascade_state(1.0, 5, 0.5, 0.1);
    hold.eps = 0.0;
    const auto kept = cascade_advance(hold, 1.0);
    CHECK(kept.beta == 0.5);

    CHECK_THROWS_AS(make_cascade_state(1.0, 1, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_cascade_state(1.0, 5, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(cascade_advance(st, 1.5), std::invalid_argument);
}

TEST_CASE("fixed floor arithmetic") {
    const auto pn = step3_paper_numbers();
    CHECK(pn.floor_target == doctest::Approx(0.9283177667225558).epsilon(1e-12));
    CHECK(pn.first_step == doctest::Approx(pn.floor_target / 3.0).epsilon(1e-12));
    CHECK(pn.first_step > 0.2);
    CHECK(pn.chain == doctest::Approx(0.8617738760127536).epsilon(1e-12));
    CHECK(pn.chain >= 0.5);
    CHECK(pn.induction_floor == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
    CHECK(pn.first_step_ok);
    CHECK(pn.chain_ok);
    CHECK(pn.induction_ok);
}

TEST_CASE("certificate regime checks are named") {
    // theta above K ln N / 2 - 1 leaves a negative concentration exponent
    try {
        step3_certificate(1.0, 1.5, 8, 112.0, 0.1);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("theta") != std::string::npos);
    }
    // a below the budget threshold
    const double astar = profiles::a_star(2.0, 3.0, 8);
    CHECK_THROWS_AS(step3_certificate(2.0, 3.0, 8, 0.9 * astar, 0.5),
                    std::invalid_argument);
}

TEST_CASE("certificate finds a finite start in a valid regime") {
    const double astar = profiles::a_star(2.0, 3.0, 8);
    const auto rep = step3_certificate(2.0, 3.0, 8, 1.1 * astar, 0.5);
    CHECK(rep.q == doctest::Approx(2.0 * std::log(8.0) - 3.0).epsilon(1e-12));
    CHECK(rep.s > 1.0);
    CHECK(std::isfinite(rep.n0));
    CHECK(rep.floors_ok);
    CHECK(rep.product_eps >= rep.floor_target);
    CHECK(rep.product_pB >= rep.floor_target);
    CHECK(rep.product_pA >= rep.floor_target);
    CHECK(rep.induction_ok);
    CHECK(rep.beta_min >= 0.2);
    CHECK(rep.pG_min >= 0.5);

    // a larger budget never needs a later start
    const auto rep2 = step3_certificate(2.0, 3.0, 8, 1.3 * astar, 0.5);
    CHECK(std::isfinite(rep2.n0));
    CHECK(rep2.n0 <= rep.n0);
}

TEST_CASE("annulus catalog: exact values next to their asymptotics") {
    // the decay target: no-connection probability times n^a approaches 1
    for (std::uint64_t n = 30; n <= 40; ++n) {
        const auto ev = lemma51_exact_and_asymptotic(AnnulusCase::C, 3, 1.0, 0.0,
                                                     2.0, n);
        CHECK(ev.asymptotic == doctest::Approx(std::pow(double(n), -2.0)));
        const double ratio = ev.exact / ev.asymptotic;
        CHECK(ratio > 0.8);
        CHECK(ratio < 1.2);
    }
    // connection probabilities decrease as the target shell moves out
    double prev = 1.0;
    for (std::uint32_t j = 1; j <= 4; ++j) {
        const auto ev = lemma51_exact_and_asymptotic(AnnulusCase::A, 3, 1.0, 0.0,
                                                     2.0, 12, j);
        CHECK(ev.exact < prev);
        CHECK(ev.exact >= 0.0);
        prev = ev.exact;
    }
    // the no-edge probability complements a connection event
    const auto eb = lemma51_exact_and_asymptotic(AnnulusCase::B, 3, 1.0, 0.0, 2.0, 12);
    CHECK(eb.exact >= 0.0);
    CHECK(eb.exact <= 1.0);
    // one annulus out, case D coincides with case A; further out it shrinks
    const auto ea = lemma51_exact_and_asymptotic(AnnulusCase::A, 3, 1.0, 0.0, 2.0, 12, 2);
    const auto d1 = lemma51_exact_and_asymptotic(AnnulusCase::D, 3, 1.0, 0.0, 2.0, 12, 2, 1);
    const auto d2 = lemma51_exact_and_asymptotic(AnnulusCase::D, 3, 1.0, 0.0, 2.0, 12, 2, 2);
    CHECK(d1.exact == doctest::Approx(ea.exact).epsilon(1e-15));
    CHECK(d2.exact < d1.exact);
    // reach beyond the next scale point shrinks over a decade (the floored
    // scale points make the step-to-step values jitter, so compare far apart)
    for (std::uint64_t n = 6; n <= 12; ++n) {
        const auto ee = lemma51_exact_and_asymptotic(AnnulusCase::E, 3, 1.0, 0.0, 2.0, n);
        CHECK(ee.exact >= 0.0);
        CHECK(ee.exact <= 1.0);
    }
    const auto e6 = lemma51_exact_and_asymptotic(AnnulusCase::E, 3, 1.0, 0.0, 2.0, 6);
    const auto e40 = lemma51_exact_and_asymptotic(AnnulusCase::E, 3, 1.0, 0.0, 2.0, 40);
    CHECK(e40.exact < e6.exact);
    // partial sums of the reach events grow with the horizon
    const auto f1 = lemma51_exact_and_asymptotic(AnnulusCase::F, 3, 1.0, 0.0, 2.0, 10);
    const auto f2 = lemma51_exact_and_asymptotic(AnnulusCase::F, 3, 1.0, 0.0, 2.0, 20);
    CHECK(f2.exact >= f1.exact);
    CHECK(std::isfinite(f2.exact));
    CHECK(f2.asymptotic >= f1.asymptotic);

    // a = 0 disables every connection
    const auto z = lemma51_exact_and_asymptotic(AnnulusCase::A, 3, 1.0, 0.0, 0.0, 10);
    CHECK(z.exact == 0.0);
    const auto zc = lemma51_exact_and_asymptotic(AnnulusCase::C, 3, 1.0, 0.0, 0.0, 10);
    CHECK(zc.exact == doctest::Approx(1.0));

    // the regime needs K ln N > 1
    CHECK_THROWS_AS(lemma51_exact_and_asymptotic(AnnulusCase::C, 2, 1.0, 0.0, 2.0, 10),
                    std::invalid_argument);
}

TEST_CASE("skip bound dominates the exact skip probability") {
    for (std::uint64_t n = 5; n <= 60; n += 5) {
        const auto r = skip_annulus_bound(4, 1.0, 0.5, 40.0, 0.0, n, 2, 100.0);
        CHECK(r.exact >= 0.0);
        CHECK(r.exact <= 1.0);
        CHECK(r.bound > 0.0);
        CHECK(r.exact <= r.bound);
    }
    CHECK_THROWS_AS(skip_annulus_bound(4, 1.0, 0.5, 40.0, 0.0, 10, 1, 100.0),
                    std::invalid_argument);  // needs j >= 2
    CHECK_THROWS_AS(skip_annulus_bound(4, 1.0, 1.9, 40.0, 0.0, 10, 2, 100.0),
                    std::invalid_argument);  // b out of the regime
}

TEST_CASE("pre-percolation scan in the summable regime") {
    profiles::ConnectionProfile p;
    p.N = 3;
    p.delta = 1.0;
    p.family = profiles::ScaledLog{1.0, 0.0, 6.0, 0.0, profiles::Interp::Lower};
    const auto scan = pre_percolation_scan(p, 2, 120, false, 5);
    CHECK(scan.a_eff == doctest::Approx(2.0));
    REQUIRE(scan.n_values.size() == 119);
    for (std::size_t i = 0; i < scan.p_no_connection.size(); ++i) {
        CHECK(scan.p_no_connection[i] >= 0.0);
        CHECK(scan.p_no_connection[i] <= 1.0);
    }
    // the no-connection mass decays roughly like n^{-2}
    for (std::size_t i = 0; i < scan.n_values.size(); ++i) {
        const auto n = scan.n_values[i];
        if (n < 30) continue;
        const double scaled = scan.p_no_connection[i] * double(n) * double(n);
        CHECK(scaled > 0.05);
        CHECK(scaled < 20.0);
    }
    // late increments are tiny
    const double inc = scan.partial_sums.back() -
                       scan.partial_sums[scan.partial_sums.size() - 2];
    CHECK(inc < 1e-3);
    CHECK(scan.connected_indicator.empty());
}

TEST_CASE("pre-percolation scan in the divergent regime") {
    profiles::ConnectionProfile p;
    p.N = 3;
    p.delta = 1.0;
    p.family = profiles::ScaledLog{1.0, 0.0, 1.5, 0.0, profiles::Interp::Lower};
    const auto scan = pre_percolation_scan(p, 2, 400, false, 5);
    CHECK(scan.a_eff == doctest::Approx(0.5));
    // mass keeps accumulating: the second half adds substantially
    const double mid = scan.partial_sums[scan.partial_sums.size() / 2];
    CHECK(scan.partial_sums.back() - mid > 1.0);
}

TEST_CASE("pre-percolation scan sampling and validation") {
    profiles::ConnectionProfile p;
    p.N = 3;
    p.delta = 1.0;
    p.family = profiles::ScaledLog{1.0, 0.0, 6.0, 0.0, profiles::Interp::Lower};
    const auto s1 = pre_percolation_scan(p, 2, 40, true, 77);
    const auto s2 = pre_percolation_scan(p, 2, 40, true, 77);
    REQUIRE(s1.connected_indicator.size() == 39);
    CHECK(s1.connected_indicator == s2.connected_indicator);
    // with tiny no-connection mass the indicators are almost all ones
    std::uint64_t ones = 0;
    for (const auto v : s1.connected_indicator) ones += v;
    CHECK(ones > 30);

    profiles::ConnectionProfile bad = p;
    bad.family = profiles::Constant{2.0};
    CHECK_THROWS_AS(pre_percolation_scan(bad, 2, 10, false, 1), std::invalid_argument);
    profiles::ConnectionProfile badb = p;
    badb.family = profiles::ScaledLog{1.0, 0.0, 6.0, 0.5, profiles::Interp::Lower};
    CHECK_THROWS_AS(pre_percolation_scan(badb, 2, 10, false, 1), std::invalid_argument);
    CHECK_THROWS_AS(pre_percolation_scan(p, 1, 10, false, 1), std::invalid_argument);
}

TEST_CASE("reporting helpers") {
    // r_tilde follows its closed form
    const double lnN = std::log(8.0);
    const double ln20 = std::log(20.0);
    const double want = std::exp(std::log(30.0 * ln20) -
                                 (1.0 - 2.0 / lnN) * ln20 * lnN - ln20 * lnN);
    CHECK(r_tilde_n(30.0, 1.0, 8, 20) == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(r_tilde_n(0.0, 1.0, 8, 20), std::invalid_argument);

    CHECK(alpha_lambda(0.5) == doctest::Approx(0.5 - 1.0 - std::log(0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(alpha_lambda(1.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_lambda(0.0), std::invalid_argument);

    const auto gt = er_giant_tail(100.0, 0.5, 0.1);
    CHECK(gt.threshold ==
          doctest::Approx(1.1 * std::log(100.0) / alpha_lambda(0.5)).epsilon(1e-12));
    CHECK(gt.bound == doctest::Approx(std::pow(100.0, -1.1) / 0.5).epsilon(1e-12));
}

TEST_CASE("one stage of the density-exponent diagnostic") {
    const auto gs = gamma_recursion_step(2, 0.5, 4.0, 0.8, 10, 0.9, 0.05);
    CHECK(gs.k_n == doctest::Approx(23.0));
    CHECK(gs.k_np1 == doctest::Approx(26.0));
    CHECK(gs.M == doctest::Approx(8.0));
    CHECK(gs.t == doctest::Approx(std::pow(2.0, 0.8 * 3.0)).epsilon(1e-12));
    CHECK(gs.mean == doctest::Approx(7.2));
    CHECK(gs.binom_lb > 0.0);
    CHECK(gs.binom_lb < 1.0);
    CHECK(gs.bracket >= 0.0);
    CHECK(gs.bracket <= 1.0);
    CHECK(gs.p_next_lb >= 0.0);
    CHECK(gs.p_next_lb <= 1.0);
    CHECK(gs.p_next_lb <= gs.binom_lb);
    CHECK(gs.delta_threshold > 0.0);
    CHECK(gs.delta_threshold < 1.0);
    // gamma must exceed (1+delta)/2 for the merge pairs to dominate
    CHECK_THROWS_AS(gamma_recursion_step(2, 2.0, 4.0, 0.75, 10, 0.9, 0.05),
                    std::invalid_argument);
    // a huge scale increment is reported as out of the diagnostic's reach
    CHECK_THROWS_AS(gamma_recursion_step(4000000000u, 0.5, 4.0, 0.8,
                                         1000000000000ULL, 0.9, 0.05),
                    std::invalid_argument);
}
