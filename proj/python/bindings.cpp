#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ultraperc/erconn.hpp"
#include "ultraperc/hierarchy.hpp"
#include "ultraperc/meanfield.hpp"
#include "ultraperc/profiles.hpp"
#include "ultraperc/renorm.hpp"
#include "ultraperc/runner.hpp"
#include "ultraperc/sampler.hpp"

namespace py = pybind11;
using namespace ultraperc;

namespace {

profiles::ConnectionProfile constant_profile(std::uint32_t N, double delta,
                                             double c) {
    profiles::ConnectionProfile p;
    p.N = N;
    p.delta = delta;
    p.family = profiles::Constant{c};
    return p;
}

renorm::AnnulusCase case_of(const std::string& s) {
    if (s == "a") return renorm::AnnulusCase::A;
    if (s == "b") return renorm::AnnulusCase::B;
    if (s == "c") return renorm::AnnulusCase::C;
    if (s == "d") return renorm::AnnulusCase::D;
    if (s == "e") return renorm::AnnulusCase::E;
    if (s == "f") return renorm::AnnulusCase::F;
    throw std::invalid_argument("case must be one of a b c d e f");
}

}  // namespace

PYBIND11_MODULE(_ultraperc, m) {
    m.doc() = "hierarchical long-range percolation toolkit";

    m.def("run", &cli::run, py::arg("args"),
          "run the command-line interface; returns its exit code");

    m.def("ball_point_count", &hierarchy::ball_point_count, py::arg("N"), py::arg("k"));
    m.def("pair_count_at_distance", &hierarchy::pair_count_at_distance,
          py::arg("N"), py::arg("k"), py::arg("m"));
    m.def("distance_of_indices", &hierarchy::distance_of_indices,
          py::arg("i"), py::arg("j"), py::arg("N"));

    m.def("connection_probability",
          [](std::uint32_t N, double delta, double c, std::uint32_t k) {
              return profiles::connection_probability(constant_profile(N, delta, c), k);
          },
          py::arg("N"), py::arg("delta"), py::arg("c"), py::arg("k"),
          "p_(k) = min(c / N^{k(1+delta)}, 1)");
    m.def("a_star", &profiles::a_star, py::arg("K"), py::arg("b"), py::arg("N"));
    m.def("scale_index", &profiles::scale_index, py::arg("K"), py::arg("n"));

    m.def("survival_beta", &meanfield::survival_beta, py::arg("lam"));
    m.def("alogk_percolation",
          [](double a, double offset, std::uint64_t kmax, double tol) {
              const meanfield::Sequence s = meanfield::ALogK{a, offset};
              const auto pe = meanfield::percolation_probability(s, kmax, tol);
              py::dict d;
              d["product"] = pe.product;
              d["converged"] = pe.converged;
              d["extinct"] = pe.extinct;
              d["tail_defect"] = pe.tail_defect;
              d["warnings"] = pe.warnings;
              return d;
          },
          py::arg("a"), py::arg("offset") = 4.0, py::arg("kmax") = 10000,
          py::arg("tol") = 1e-8,
          "truncated survival product for c_k = a ln(k + offset)");

    m.def("exact_connectivity", &erconn::exact_connectivity, py::arg("n"), py::arg("p"));
    m.def("mc_connectivity",
          [](std::uint32_t n, double p, std::uint64_t replicates, std::uint64_t seed,
             unsigned workers) {
              const auto w = erconn::mc_connectivity(n, p, replicates, seed, workers);
              return py::make_tuple(w.estimate, w.lo, w.hi);
          },
          py::arg("n"), py::arg("p"), py::arg("replicates"), py::arg("seed"),
          py::arg("workers") = 1);
    m.def("durrett_lower_bound",
          [](std::uint64_t n, double a) {
              const auto b = erconn::durrett_lower_bound(n, a);
              return py::make_tuple(b.value, b.raw, b.clamped);
          },
          py::arg("n"), py::arg("a"));
    m.def("binomial_tail_bound", &erconn::binomial_tail_bound,
          py::arg("n"), py::arg("q"), py::arg("x"), py::arg("c"));
    m.def("exact_binomial_tail", &erconn::exact_binomial_tail,
          py::arg("n"), py::arg("q"), py::arg("x"));
    m.def("chernoff_kappa",
          [](double eps_max) { return erconn::chernoff_kappa(eps_max).kappa; },
          py::arg("eps_max") = 0.5);
    m.def("h_rate", &erconn::h_rate, py::arg("c"));

    m.def("largest_cluster_density",
          [](std::uint32_t N, double delta, double c, std::uint32_t k,
             std::uint64_t seed, std::uint64_t replicate) {
              const auto g =
                  sampler::realize_ball(constant_profile(N, delta, c), k, seed, replicate);
              return sampler::largest_cluster(g).density;
          },
          py::arg("N"), py::arg("delta"), py::arg("c"), py::arg("k"), py::arg("seed"),
          py::arg("replicate") = 0);

    m.def("step3_paper_numbers",
          []() {
              const auto p = renorm::step3_paper_numbers();
              py::dict d;
              d["floor_target"] = p.floor_target;
              d["first_step"] = p.first_step;
              d["chain"] = p.chain;
              d["induction_floor"] = p.induction_floor;
              d["first_step_ok"] = p.first_step_ok;
              d["chain_ok"] = p.chain_ok;
              d["induction_ok"] = p.induction_ok;
              return d;
          });
    m.def("step3_certificate",
          [](double K, double b, std::uint32_t N, double a, double theta,
             double n0_start, std::uint64_t horizon) {
              const auto r = renorm::step3_certificate(K, b, N, a, theta, n0_start, horizon);
              py::dict d;
              d["n0"] = r.n0;
              d["floors_ok"] = r.floors_ok;
              d["induction_ok"] = r.induction_ok;
              d["q"] = r.q;
              d["s"] = r.s;
              d["product_eps"] = r.product_eps;
              d["product_pB"] = r.product_pB;
              d["product_pA"] = r.product_pA;
              d["beta_min"] = r.beta_min;
              d["pG_min"] = r.pG_min;
              return d;
          },
          py::arg("K"), py::arg("b"), py::arg("N"), py::arg("a"), py::arg("theta"),
          py::arg("n0_start") = 2.0, py::arg("horizon") = 64);
    m.def("lemma51_exact_and_asymptotic",
          [](const std::string& which, std::uint32_t N, double K, double C, double a,
             std::uint64_t n, std::uint32_t j, std::uint32_t ell) {
              const auto e =
                  renorm::lemma51_exact_and_asymptotic(case_of(which), N, K, C, a, n, j, ell);
              return py::make_tuple(e.exact, e.asymptotic);
          },
          py::arg("which"), py::arg("N"), py::arg("K"), py::arg("C"), py::arg("a"),
          py::arg("n"), py::arg("j") = 1, py::arg("ell") = 1);
    m.def("r_n", &renorm::r_n, py::arg("beta"), py::arg("a"), py::arg("K"),
          py::arg("b"), py::arg("N"), py::arg("n"));
}
