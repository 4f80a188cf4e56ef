#include "ultraperc/runner.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ultraperc/erconn.hpp"
#include "ultraperc/errors.hpp"
#include "ultraperc/hierarchy.hpp"
#include "ultraperc/meanfield.hpp"
#include "ultraperc/parallel.hpp"
#include "ultraperc/profiles.hpp"
#include "ultraperc/renorm.hpp"
#include "ultraperc/sampler.hpp"

namespace ultraperc::cli {
namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Cells never contain the CSV separator; strings are sanitized on entry.
std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::string cell_to_csv(const nlohmann::json& v) {
    if (v.is_string()) return sanitize(v.get<std::string>());
    if (v.is_number_float()) return fmt_double(v.get<double>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    return "0";
}

// Every emitted number must be finite; out-of-range values are clamped and
// the row's `clamped` flag is raised so downstream tooling can tell.
double finite_guard(double v, std::uint64_t& clamped) {
    if (std::isfinite(v)) return v;
    clamped = 1;
    if (std::isnan(v)) return 0.0;
    return v > 0 ? std::numeric_limits<double>::max()
                 : -std::numeric_limits<double>::max();
}

struct Table {
    std::vector<std::string> cols;
    std::vector<nlohmann::json> rows;
};

nlohmann::json zero_row(const std::vector<std::string>& cols) {
    nlohmann::json r = nlohmann::json::object();
    for (const auto& c : cols) r[c] = 0.0;
    return r;
}

struct IoOpts {
    std::uint64_t seed = 0;
    unsigned workers = 0;  // 0 = take ULTRAPERC_WORKERS, else 1
    std::string out;
    std::string format = "csv";
    std::string config;
};

void add_io(CLI::App* sub, IoOpts& io) {
    sub->add_option("--seed", io.seed, "base RNG seed (replicate i derives its own stream)")
        ->required();
    sub->add_option("--workers", io.workers, "worker threads; default ULTRAPERC_WORKERS or 1")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", io.out, "output file (default: stdout)");
    sub->add_option("--format", io.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", io.config,
                    "flat key=value file; command-line flags override");
}

// Applies a flat key=value file to the options of one subcommand.  Keys name
// the long options without the leading dashes; values given on the command
// line win.  Unknown keys are errors so typos do not pass silently.
void apply_config(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        CLI::detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        CLI::detail::trim(key);
        CLI::detail::trim(val);
        CLI::Option* op = key == "config" ? nullptr
                                          : sub->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::invalid_argument("unknown config key '" + key + "' for " +
                                        sub->get_name());
        if (op->count() > 0) continue;
        op->add_result(val);
        op->run_callback();
    }
}

unsigned resolve_workers(const IoOpts& io) {
    if (io.workers > 0) return io.workers;
    if (const char* env = std::getenv("ULTRAPERC_WORKERS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1 && v <= 1024)
            return static_cast<unsigned>(v);
    }
    return 1;
}

void emit_table(const IoOpts& io, const std::string& experiment, const Table& t) {
    std::string payload;
    if (io.format == "json") {
        nlohmann::json out;
        out["experiment"] = experiment;
        out["columns"] = t.cols;
        out["rows"] = t.rows;
        payload = out.dump();
        payload += "\n";
    } else {
        std::ostringstream o;
        for (std::size_t i = 0; i < t.cols.size(); ++i)
            o << (i ? "," : "") << t.cols[i];
        o << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < t.cols.size(); ++i)
                o << (i ? "," : "") << cell_to_csv(row.at(t.cols[i]));
            o << "\n";
        }
        payload = o.str();
    }
    if (io.out.empty()) {
        std::cout << payload;
        std::cout.flush();
    } else {
        std::ofstream f(io.out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file: " + io.out);
        f << payload;
    }
}

// ---- connection profile flags (shared by simulate / cascade / preperc) ----

struct ProfileOpts {
    std::uint32_t N = 2;
    double delta = 0.0;
    std::string family = "constant";
    double c = 1.0;
    double C0 = 0.0, C1 = 0.0, C2 = 0.0, alpha = 1.0;
    double K = 1.0, C = 0.0, a = 1.0, b = 0.0;
    std::string interp = "lower";
    std::string table;
};

void add_profile(CLI::App* sub, ProfileOpts& po) {
    sub->add_option("--N", po.N, "hierarchy base")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--delta", po.delta, "connection exponent offset, > -1");
    sub->add_option("--family", po.family, "constant | logpoly | scaledlog | table")
        ->check(CLI::IsMember({"constant", "logpoly", "scaledlog", "table"}));
    sub->add_option("--c", po.c, "constant family coefficient");
    sub->add_option("--C0", po.C0, "logpoly constant term");
    sub->add_option("--C1", po.C1, "logpoly log coefficient");
    sub->add_option("--C2", po.C2, "logpoly power coefficient");
    sub->add_option("--alpha", po.alpha, "logpoly log power");
    sub->add_option("--K", po.K, "scaledlog scale constant");
    sub->add_option("--C", po.C, "scaledlog constant term");
    sub->add_option("--a", po.a, "scaledlog linear-in-log coefficient");
    sub->add_option("--b", po.b, "scaledlog power coefficient");
    sub->add_option("--interp", po.interp, "scaledlog off-scale rule: lower | upper | geometric")
        ->check(CLI::IsMember({"lower", "upper", "geometric"}));
    sub->add_option("--table", po.table, "comma-separated c_k values for the table family");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    return v;
}

profiles::Interp interp_from(const std::string& s) {
    if (s == "upper") return profiles::Interp::Upper;
    if (s == "geometric") return profiles::Interp::Geometric;
    return profiles::Interp::Lower;
}

profiles::ConnectionProfile build_profile(const ProfileOpts& po) {
    profiles::ConnectionProfile p;
    p.N = po.N;
    p.delta = po.delta;
    if (po.family == "constant") {
        p.family = profiles::Constant{po.c};
    } else if (po.family == "logpoly") {
        p.family = profiles::LogPoly{po.C0, po.C1, po.C2, po.alpha};
    } else if (po.family == "scaledlog") {
        p.family = profiles::ScaledLog{po.K, po.C, po.a, po.b, interp_from(po.interp)};
    } else {
        if (po.table.empty())
            throw std::invalid_argument("the table family needs --table values");
        p.family = profiles::Table{parse_list(po.table)};
    }
    return p;
}

std::string profile_echo(const ProfileOpts& po) {
    std::ostringstream o;
    o << "N=" << po.N << ";delta=" << fmt_double(po.delta) << ";family=" << po.family;
    if (po.family == "constant") {
        o << ";c=" << fmt_double(po.c);
    } else if (po.family == "logpoly") {
        o << ";C0=" << fmt_double(po.C0) << ";C1=" << fmt_double(po.C1)
          << ";C2=" << fmt_double(po.C2) << ";alpha=" << fmt_double(po.alpha);
    } else if (po.family == "scaledlog") {
        o << ";K=" << fmt_double(po.K) << ";C=" << fmt_double(po.C)
          << ";a=" << fmt_double(po.a) << ";b=" << fmt_double(po.b)
          << ";interp=" << po.interp;
    } else {
        o << ";table=" << sanitize(po.table);
    }
    return o.str();
}

// ---- simulate ----

struct SimulateOpts {
    std::uint32_t k = 4;
    std::uint32_t k_min = 1;
    std::uint64_t replicates = 10;
};

int run_simulate(const ProfileOpts& po, const SimulateOpts& so, const IoOpts& io) {
    if (so.k_min > so.k)
        throw std::invalid_argument("--k-min must not exceed --k");
    auto profile = build_profile(po);
    unsigned workers = resolve_workers(io);
    std::string echo = profile_echo(po);

    Table t;
    t.cols = {"experiment", "params", "k", "replicate",
              "n_points",   "largest_size", "density", "seed"};
    for (std::uint32_t k = so.k_min; k <= so.k; ++k) {
        std::vector<sampler::ClusterSummary> res(so.replicates);
        parallel_for_index(so.replicates, workers, [&](std::uint64_t i) {
            auto g = sampler::realize_ball(profile, k, io.seed, i);
            res[i] = sampler::largest_cluster(g);
        });
        std::uint64_t n_points = hierarchy::ball_point_count(po.N, k);
        for (std::uint64_t r = 0; r < so.replicates; ++r) {
            nlohmann::json row = zero_row(t.cols);
            row["experiment"] = "simulate";
            row["params"] = echo;
            row["k"] = static_cast<std::uint64_t>(k);
            row["replicate"] = r;
            row["n_points"] = n_points;
            row["largest_size"] = res[r].largest_size;
            row["density"] = res[r].density;
            row["seed"] = io.seed;
            t.rows.push_back(std::move(row));
        }
    }
    emit_table(io, "simulate", t);
    return 0;
}

// ---- cascade ----

struct CascadeOpts {
    std::string mode = "certificate";
    double K = 1.0, b = 1.5, a = 0.0, theta = 0.1;
    double n0_start = 2.0, kappa = 0.0, M = 1.0, L = 1.0;
    std::uint64_t horizon = 64;
    std::uint64_t n_lo = 2, n_hi = 6;
    double beta0 = 0.5;
    std::uint64_t replicates = 200;
};

int run_cascade_certificate(const std::uint32_t N, const CascadeOpts& co, const IoOpts& io) {
    auto rep = renorm::step3_certificate(co.K, co.b, N, co.a, co.theta, co.n0_start,
                                         co.horizon, co.kappa, co.M, co.L);
    Table t;
    t.cols = {"experiment", "params", "n0_found", "n0", "floor_target", "kappa",
              "q", "s", "floors_ok", "product_eps", "product_pB", "product_pA",
              "beta_final", "beta_min", "pG_min", "induction_ok", "horizon",
              "clamped", "seed"};
    std::ostringstream echo;
    echo << "K=" << fmt_double(co.K) << ";b=" << fmt_double(co.b) << ";N=" << N
         << ";a=" << fmt_double(co.a) << ";theta=" << fmt_double(co.theta)
         << ";n0_start=" << fmt_double(co.n0_start) << ";horizon=" << co.horizon
         << ";M=" << fmt_double(co.M) << ";L=" << fmt_double(co.L);
    nlohmann::json row = zero_row(t.cols);
    std::uint64_t clamped = 0;
    row["experiment"] = "cascade";
    row["params"] = echo.str();
    row["n0_found"] = std::uint64_t{std::isfinite(rep.n0) ? 1u : 0u};
    row["n0"] = std::isfinite(rep.n0) ? rep.n0 : 0.0;
    row["floor_target"] = rep.floor_target;
    row["kappa"] = rep.kappa;
    row["q"] = finite_guard(rep.q, clamped);
    row["s"] = finite_guard(rep.s, clamped);
    row["floors_ok"] = std::uint64_t{rep.floors_ok ? 1u : 0u};
    row["product_eps"] = rep.product_eps;
    row["product_pB"] = rep.product_pB;
    row["product_pA"] = rep.product_pA;
    row["beta_final"] = rep.beta_final;
    row["beta_min"] = rep.beta_min;
    row["pG_min"] = rep.pG_min;
    row["induction_ok"] = std::uint64_t{rep.induction_ok ? 1u : 0u};
    row["horizon"] = rep.horizon;
    row["clamped"] = clamped;
    row["seed"] = io.seed;
    t.rows.push_back(std::move(row));
    emit_table(io, "cascade", t);
    return 0;
}

int run_cascade_mc(const ProfileOpts& po, const CascadeOpts& co, const IoOpts& io) {
    if (po.family != "scaledlog")
        throw std::invalid_argument("cascade --mode mc needs --family scaledlog");
    if (co.n_lo < 2 || co.n_lo > co.n_hi)
        throw std::invalid_argument("cascade needs 2 <= --n-lo <= --n-hi");
    auto profile = build_profile(po);
    const auto& fam = std::get<profiles::ScaledLog>(profile.family);
    unsigned workers = resolve_workers(io);
    std::string echo = profile_echo(po);

    Table t;
    t.cols = {"experiment", "params", "n", "k_n", "beta", "threshold",
              "estimate", "lo", "hi", "successes", "replicates", "eps",
              "r_n", "r_n_defined", "beta_next", "beta_floor_ok",
              "pG_floor_ok", "seed"};
    auto state = renorm::make_cascade_state(fam.K, co.n_lo, co.beta0, co.theta);
    for (std::uint64_t n = co.n_lo; n <= co.n_hi; ++n) {
        if (!(state.beta > 0.0)) break;
        std::uint64_t kn = profiles::scale_index(fam.K, n);
        if (kn > 10000)
            throw infeasible_scale_error("scale index k_n too large to simulate");
        auto est = renorm::good_ball_probability(profile, renorm::BetaGood{state.beta},
                                                 static_cast<std::uint32_t>(kn),
                                                 co.replicates, io.seed, workers);
        bool rn_ok = fam.b > 0.0 && fam.b < 2.0 * fam.K && state.beta < 1.0 && n >= 2;
        double rn = rn_ok ? renorm::r_n(state.beta, fam.a, fam.K, fam.b, po.N, n) : 0.0;
        auto next = renorm::cascade_advance(state, est.ci.estimate);

        nlohmann::json row = zero_row(t.cols);
        row["experiment"] = "cascade";
        row["params"] = echo;
        row["n"] = n;
        row["k_n"] = kn;
        row["beta"] = state.beta;
        row["threshold"] = est.threshold;
        row["estimate"] = est.ci.estimate;
        row["lo"] = est.ci.lo;
        row["hi"] = est.ci.hi;
        row["successes"] = est.successes;
        row["replicates"] = co.replicates;
        row["eps"] = state.eps;
        row["r_n"] = rn;
        row["r_n_defined"] = std::uint64_t{rn_ok ? 1u : 0u};
        row["beta_next"] = next.beta;
        row["beta_floor_ok"] = std::uint64_t{next.beta_floor_ok ? 1u : 0u};
        row["pG_floor_ok"] = std::uint64_t{next.pG_floor_ok ? 1u : 0u};
        row["seed"] = io.seed;
        t.rows.push_back(std::move(row));
        state = next;
    }
    emit_table(io, "cascade", t);
    return 0;
}

// ---- meanfield ----

struct MeanfieldOpts {
    std::string family = "alogk";
    double c = 2.0;
    double a = 2.0;
    double offset = 4.0;
    std::string table;
    std::uint64_t kmax = 10000;
    double tol = 1e-8;
};

int run_meanfield(const MeanfieldOpts& mo, const IoOpts& io) {
    meanfield::Sequence seq;
    std::ostringstream echo;
    echo << "family=" << mo.family;
    if (mo.family == "constant") {
        seq = meanfield::ConstantSeq{mo.c};
        echo << ";c=" << fmt_double(mo.c);
    } else if (mo.family == "alogk") {
        seq = meanfield::ALogK{mo.a, mo.offset};
        echo << ";a=" << fmt_double(mo.a) << ";offset=" << fmt_double(mo.offset);
    } else {
        if (mo.table.empty())
            throw std::invalid_argument("the table family needs --table values");
        seq = meanfield::TableSeq{parse_list(mo.table)};
        echo << ";table=" << sanitize(mo.table);
    }
    echo << ";kmax=" << mo.kmax << ";tol=" << fmt_double(mo.tol);

    auto bs = meanfield::beta_sequence(seq, mo.kmax);
    auto pe = meanfield::percolation_probability(seq, mo.kmax, mo.tol);
    auto sr = meanfield::exp_summability(seq, mo.kmax);
    std::string warn = "none";
    if (!pe.warnings.empty()) {
        std::ostringstream w;
        for (std::size_t i = 0; i < pe.warnings.size(); ++i)
            w << (i ? "|" : "") << pe.warnings[i];
        warn = sanitize(w.str());
    }

    Table t;
    t.cols = {"experiment", "params", "k", "c_k", "lambda", "beta",
              "partial_product", "partial_sum", "product", "converged",
              "tail_defect", "extinct", "extinct_at", "decade_ratio",
              "summable_at_horizon", "cauchy_1e9", "warnings", "seed"};
    for (std::uint64_t k = 1; k <= mo.kmax; ++k) {
        nlohmann::json row = zero_row(t.cols);
        row["experiment"] = "meanfield";
        row["params"] = echo.str();
        row["k"] = k;
        row["c_k"] = meanfield::seq_value(seq, k);
        row["lambda"] = bs.lambda[k - 1];
        row["beta"] = bs.beta[k - 1];
        row["partial_product"] = bs.partial_product[k - 1];
        row["partial_sum"] = sr.partial_sums[k - 1];
        row["product"] = pe.product;
        row["converged"] = std::uint64_t{pe.converged ? 1u : 0u};
        row["tail_defect"] = pe.tail_defect;
        row["extinct"] = std::uint64_t{bs.extinct ? 1u : 0u};
        row["extinct_at"] = bs.extinct ? bs.extinct_at : std::uint64_t{0};
        row["decade_ratio"] = sr.decade_ratio;
        row["summable_at_horizon"] = std::uint64_t{sr.summable_at_horizon ? 1u : 0u};
        row["cauchy_1e9"] = std::uint64_t{sr.cauchy_1e9 ? 1u : 0u};
        row["warnings"] = warn;
        row["seed"] = io.seed;
        t.rows.push_back(std::move(row));
    }
    emit_table(io, "meanfield", t);
    return 0;
}

// ---- erconn ----

struct ErconnOpts {
    std::uint64_t n = 3;
    double p = 0.5;
    double a = 2.0;
    double q = 0.5;
    std::uint64_t x = 0;
    double cmul = 2.0;
    double sigma = 0.1;
    double eps_max = 0.5;
    double M = 1.0, L = 1.0;
    bool exp13 = false;
    std::uint64_t n_lo = 50, n_hi = 400;
    std::uint64_t replicates = 10000;
    bool exact = false, mc = false, durrett = false, upper = false, fit = false;
    bool tail = false, exact_tail = false, kappa = false, cor53 = false;
};

int run_erconn(const ErconnOpts& eo, const IoOpts& io) {
    int picked = int(eo.exact) + int(eo.mc) + int(eo.durrett) + int(eo.upper) +
                 int(eo.fit) + int(eo.tail) + int(eo.exact_tail) + int(eo.kappa) +
                 int(eo.cor53);
    if (picked != 1)
        throw std::invalid_argument(
            "choose exactly one mode flag: --exact --mc --durrett --upper --fit "
            "--tail --exact-tail --kappa --cor53");
    if (eo.n > 1000000000ULL)
        throw std::invalid_argument("--n is too large");
    unsigned workers = resolve_workers(io);

    Table t;
    t.cols = {"experiment", "params", "mode", "n", "value", "exact", "bound",
              "raw", "lo", "hi", "kappa", "eps", "M", "L", "clamped",
              "replicates", "seed"};
    nlohmann::json row = zero_row(t.cols);
    std::uint64_t clamped = 0;
    std::string mode;
    std::ostringstream echo;
    echo << "n=" << eo.n << ";p=" << fmt_double(eo.p) << ";a=" << fmt_double(eo.a)
         << ";q=" << fmt_double(eo.q) << ";x=" << eo.x << ";c=" << fmt_double(eo.cmul)
         << ";sigma=" << fmt_double(eo.sigma) << ";eps_max=" << fmt_double(eo.eps_max)
         << ";M=" << fmt_double(eo.M) << ";L=" << fmt_double(eo.L)
         << ";exp13=" << (eo.exp13 ? 1 : 0) << ";n_lo=" << eo.n_lo
         << ";n_hi=" << eo.n_hi;

    if (eo.exact) {
        mode = "exact";
        double v = erconn::exact_connectivity(static_cast<std::uint32_t>(eo.n), eo.p);
        row["value"] = v;
        row["exact"] = v;
    } else if (eo.mc) {
        mode = "mc";
        auto wi = erconn::mc_connectivity(static_cast<std::uint32_t>(eo.n), eo.p,
                                          eo.replicates, io.seed, workers);
        row["value"] = wi.estimate;
        row["lo"] = wi.lo;
        row["hi"] = wi.hi;
        row["replicates"] = wi.replicates;
    } else if (eo.durrett) {
        mode = "durrett";
        auto db = erconn::durrett_lower_bound(eo.n, eo.a);
        if (db.clamped) clamped = 1;
        row["value"] = db.value;
        row["raw"] = finite_guard(db.raw, clamped);
    } else if (eo.upper) {
        mode = "upper";
        double v = erconn::nonconnectivity_upper_bound(eo.n, eo.a, eo.M, eo.L, eo.exp13);
        row["value"] = finite_guard(v, clamped);
        row["bound"] = row["value"];
        row["M"] = eo.M;
        row["L"] = eo.L;
    } else if (eo.fit) {
        mode = "fit";
        auto bc = erconn::fit_nonconnectivity_constants(eo.a, eo.n_lo, eo.n_hi, eo.exp13);
        row["value"] = bc.M;
        row["M"] = bc.M;
        row["L"] = bc.L;
    } else if (eo.tail) {
        mode = "tail";
        double b = erconn::binomial_tail_bound(eo.n, eo.q, eo.x, eo.cmul);
        double e = erconn::exact_binomial_tail(eo.n, eo.q, eo.x);
        row["value"] = finite_guard(b, clamped);
        row["bound"] = row["value"];
        row["exact"] = e;
    } else if (eo.exact_tail) {
        mode = "exact-tail";
        double e = erconn::exact_binomial_tail(eo.n, eo.q, eo.x);
        row["value"] = e;
        row["exact"] = e;
    } else if (eo.kappa) {
        mode = "kappa";
        auto kr = erconn::chernoff_kappa(eo.eps_max);
        row["value"] = kr.kappa;
        row["kappa"] = kr.kappa;
        row["eps"] = kr.eps;
    } else {
        mode = "cor53";
        auto kr = erconn::chernoff_kappa(eo.eps_max);
        auto cr = erconn::cor53_bound(eo.n, eo.p, eo.sigma, kr);
        row["value"] = cr.bound;
        row["bound"] = cr.bound;
        row["exact"] = cr.exact;
        row["kappa"] = kr.kappa;
        row["eps"] = kr.eps;
    }

    row["experiment"] = "erconn";
    row["params"] = echo.str();
    row["mode"] = mode;
    row["n"] = eo.n;
    row["clamped"] = clamped;
    row["seed"] = io.seed;
    t.rows.push_back(std::move(row));
    emit_table(io, "erconn", t);
    return 0;
}

// ---- asymptotics ----

struct AsymptoticsOpts {
    std::string mode = "annulus";
    std::string case_name = "c";
    std::uint32_t N = 3;
    double K = 1.0, C = 0.0, a = 2.0, b = 1.5;
    std::uint64_t n_lo = 2, n_hi = 20;
    std::uint64_t j = 1, ell = 1;
    double cluster_size = 1.0;
    double M = 1.0;
    double lambda = 0.5, eps = 0.1;
    double n_vertices = 100.0;
    double delta = 0.5, c = 1.0, gamma = 0.8, p0 = 0.9, eta = 0.05;
};

renorm::AnnulusCase case_from(const std::string& s) {
    if (s == "a") return renorm::AnnulusCase::A;
    if (s == "b") return renorm::AnnulusCase::B;
    if (s == "c") return renorm::AnnulusCase::C;
    if (s == "d") return renorm::AnnulusCase::D;
    if (s == "e") return renorm::AnnulusCase::E;
    if (s == "f") return renorm::AnnulusCase::F;
    throw std::invalid_argument("--case must be one of a b c d e f");
}

int run_asymptotics(const AsymptoticsOpts& ao, const IoOpts& io) {
    if (ao.n_lo < 2 || ao.n_lo > ao.n_hi)
        throw std::invalid_argument("needs 2 <= --n-lo <= --n-hi");
    Table t;
    t.cols = {"experiment", "params", "mode", "case", "n", "j", "ell",
              "exact", "asymptotic", "ratio", "ratio_defined", "bound",
              "threshold", "value", "clamped", "k_n", "k_np1", "mean",
              "binom_lb", "bracket", "eps_n", "p_next_lb", "p_next_alt",
              "delta_threshold", "seed"};
    std::ostringstream echo;
    echo << "mode=" << ao.mode << ";case=" << ao.case_name << ";N=" << ao.N
         << ";K=" << fmt_double(ao.K) << ";C=" << fmt_double(ao.C)
         << ";a=" << fmt_double(ao.a) << ";b=" << fmt_double(ao.b)
         << ";j=" << ao.j << ";ell=" << ao.ell
         << ";cluster_size=" << fmt_double(ao.cluster_size)
         << ";M=" << fmt_double(ao.M) << ";lambda=" << fmt_double(ao.lambda)
         << ";eps=" << fmt_double(ao.eps) << ";nv=" << fmt_double(ao.n_vertices)
         << ";delta=" << fmt_double(ao.delta) << ";c=" << fmt_double(ao.c)
         << ";gamma=" << fmt_double(ao.gamma) << ";p0=" << fmt_double(ao.p0)
         << ";eta=" << fmt_double(ao.eta);

    auto base = [&](void) {
        nlohmann::json row = zero_row(t.cols);
        row["experiment"] = "asymptotics";
        row["params"] = echo.str();
        row["mode"] = ao.mode;
        row["case"] = ao.case_name;
        row["seed"] = io.seed;
        return row;
    };

    if (ao.mode == "annulus") {
        auto which = case_from(ao.case_name);
        for (std::uint64_t n = ao.n_lo; n <= ao.n_hi; ++n) {
            auto ev = renorm::lemma51_exact_and_asymptotic(which, ao.N, ao.K, ao.C,
                                                           ao.a, n, ao.j, ao.ell);
            nlohmann::json row = base();
            std::uint64_t clamped = 0;
            bool rd = ev.asymptotic > 0.0 && std::isfinite(ev.asymptotic);
            row["n"] = n;
            row["j"] = ao.j;
            row["ell"] = ao.ell;
            row["exact"] = ev.exact;
            row["asymptotic"] = finite_guard(ev.asymptotic, clamped);
            row["ratio"] = rd ? finite_guard(ev.exact / ev.asymptotic, clamped) : 0.0;
            row["ratio_defined"] = std::uint64_t{rd ? 1u : 0u};
            row["value"] = ev.exact;
            row["clamped"] = clamped;
            t.rows.push_back(std::move(row));
        }
    } else if (ao.mode == "skip") {
        for (std::uint64_t n = ao.n_lo; n <= ao.n_hi; ++n) {
            auto sr = renorm::skip_annulus_bound(ao.N, ao.K, ao.b, ao.a, ao.C, n,
                                                 ao.j, ao.cluster_size, ao.M);
            nlohmann::json row = base();
            std::uint64_t clamped = 0;
            bool rd = sr.bound > 0.0 && std::isfinite(sr.bound);
            row["n"] = n;
            row["j"] = ao.j;
            row["exact"] = sr.exact;
            row["bound"] = finite_guard(sr.bound, clamped);
            row["ratio"] = rd ? finite_guard(sr.exact / sr.bound, clamped) : 0.0;
            row["ratio_defined"] = std::uint64_t{rd ? 1u : 0u};
            row["value"] = sr.exact;
            row["clamped"] = clamped;
            t.rows.push_back(std::move(row));
        }
    } else if (ao.mode == "rtilde") {
        for (std::uint64_t n = ao.n_lo; n <= ao.n_hi; ++n) {
            double v = renorm::r_tilde_n(ao.a, ao.K, ao.N, n);
            nlohmann::json row = base();
            std::uint64_t clamped = 0;
            row["n"] = n;
            row["value"] = finite_guard(v, clamped);
            row["clamped"] = clamped;
            t.rows.push_back(std::move(row));
        }
    } else if (ao.mode == "gianttail") {
        auto gt = renorm::er_giant_tail(ao.n_vertices, ao.lambda, ao.eps);
        nlohmann::json row = base();
        std::uint64_t clamped = 0;
        row["threshold"] = finite_guard(gt.threshold, clamped);
        row["bound"] = finite_guard(gt.bound, clamped);
        row["value"] = row["bound"];
        row["clamped"] = clamped;
        t.rows.push_back(std::move(row));
    } else if (ao.mode == "gamma") {
        double p = ao.p0;
        for (std::uint64_t n = ao.n_lo; n <= ao.n_hi; ++n) {
            auto gs = renorm::gamma_recursion_step(ao.N, ao.delta, ao.c, ao.gamma,
                                                   n, p, ao.eta);
            nlohmann::json row = base();
            std::uint64_t clamped = 0;
            row["n"] = n;
            row["k_n"] = gs.k_n;
            row["k_np1"] = gs.k_np1;
            row["mean"] = finite_guard(gs.mean, clamped);
            row["binom_lb"] = gs.binom_lb;
            row["bracket"] = gs.bracket;
            row["eps_n"] = gs.eps_n;
            row["p_next_lb"] = gs.p_next_lb;
            row["p_next_alt"] = gs.p_next_alt;
            row["delta_threshold"] = finite_guard(gs.delta_threshold, clamped);
            row["value"] = gs.p_next_lb;
            row["clamped"] = clamped;
            t.rows.push_back(std::move(row));
            p = gs.p_next_lb;
        }
    } else {
        throw std::invalid_argument(
            "--mode must be one of annulus skip rtilde gianttail gamma");
    }
    emit_table(io, "asymptotics", t);
    return 0;
}

// ---- preperc ----

struct PrepercOpts {
    std::uint64_t n_lo = 2, n_hi = 50;
    bool sampled = false;
};

int run_preperc(const ProfileOpts& po, const PrepercOpts& qo, const IoOpts& io) {
    auto profile = build_profile(po);
    auto scan = renorm::pre_percolation_scan(profile, qo.n_lo, qo.n_hi, qo.sampled,
                                             io.seed);
    std::string echo = profile_echo(po);
    Table t;
    t.cols = {"experiment", "params", "n", "p_no_connection", "partial_sum",
              "reference_partial", "a_eff", "indicator", "sampled", "seed"};
    for (std::size_t i = 0; i < scan.n_values.size(); ++i) {
        nlohmann::json row = zero_row(t.cols);
        row["experiment"] = "preperc";
        row["params"] = echo;
        row["n"] = scan.n_values[i];
        row["p_no_connection"] = scan.p_no_connection[i];
        row["partial_sum"] = scan.partial_sums[i];
        row["reference_partial"] = scan.reference_partials[i];
        row["a_eff"] = scan.a_eff;
        row["indicator"] = std::uint64_t{qo.sampled && scan.connected_indicator[i] ? 1u : 0u};
        row["sampled"] = std::uint64_t{qo.sampled ? 1u : 0u};
        row["seed"] = io.seed;
        t.rows.push_back(std::move(row));
    }
    emit_table(io, "preperc", t);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"hierarchical long-range percolation toolkit"};
    app.require_subcommand(1);

    ProfileOpts po_sim, po_cas, po_pre;
    SimulateOpts so;
    CascadeOpts co;
    MeanfieldOpts mo;
    ErconnOpts eo;
    AsymptoticsOpts ao;
    PrepercOpts qo;
    IoOpts io_sim, io_cas, io_mf, io_er, io_as, io_pre;

    CLI::App* sim = app.add_subcommand("simulate", "sample balls and report largest clusters");
    add_profile(sim, po_sim);
    sim->add_option("--k", so.k, "largest ball level")->check(CLI::Range(0, 64));
    sim->add_option("--k-min", so.k_min, "smallest ball level")->check(CLI::Range(0, 64));
    sim->add_option("--replicates", so.replicates, "independent realizations per level")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    add_io(sim, io_sim);

    CLI::App* cas = app.add_subcommand("cascade", "good-ball cascade: analytic certificate or Monte Carlo");
    add_profile(cas, po_cas);
    cas->add_option("--mode", co.mode, "certificate | mc")
        ->check(CLI::IsMember({"certificate", "mc"}));
    cas->add_option("--cert-K", co.K, "certificate scale constant");
    cas->add_option("--cert-b", co.b, "certificate power coefficient");
    cas->add_option("--cert-a", co.a, "certificate linear coefficient");
    cas->add_option("--theta", co.theta, "slack exponent");
    cas->add_option("--n0-start", co.n0_start, "smallest candidate starting stage");
    cas->add_option("--horizon", co.horizon, "induction steps to replay");
    cas->add_option("--kappa", co.kappa, "concentration constant; 0 derives it");
    cas->add_option("--cert-M", co.M, "tail constant");
    cas->add_option("--cert-L", co.L, "tail constant");
    cas->add_option("--n-lo", co.n_lo, "first stage (mc)");
    cas->add_option("--n-hi", co.n_hi, "last stage (mc)");
    cas->add_option("--beta0", co.beta0, "starting density floor (mc)");
    cas->add_option("--replicates", co.replicates, "realizations per stage (mc)")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    add_io(cas, io_cas);

    CLI::App* mf = app.add_subcommand("meanfield", "branching fixed points and percolation products");
    mf->add_option("--family", mo.family, "constant | alogk | table")
        ->check(CLI::IsMember({"constant", "alogk", "table"}));
    mf->add_option("--c", mo.c, "constant family value");
    mf->add_option("--a", mo.a, "alogk coefficient");
    mf->add_option("--offset", mo.offset, "alogk argument offset");
    mf->add_option("--table", mo.table, "comma-separated c_k values");
    mf->add_option("--kmax", mo.kmax, "horizon")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    mf->add_option("--tol", mo.tol, "tail tolerance for convergence reporting");
    add_io(mf, io_mf);

    CLI::App* er = app.add_subcommand("erconn", "Erdos-Renyi connectivity values and bounds");
    er->add_option("--n", eo.n, "vertex count");
    er->add_option("--p", eo.p, "edge probability");
    er->add_option("--a", eo.a, "log-weight exponent, > 1");
    er->add_option("--q", eo.q, "per-trial success probability (tail modes)");
    er->add_option("--x", eo.x, "tail threshold (tail modes)");
    er->add_option("--c", eo.cmul, "mean multiplier for the tail bound, > 1");
    er->add_option("--sigma", eo.sigma, "relative deviation (cor53 mode)");
    er->add_option("--eps-max", eo.eps_max, "kappa optimization range limit");
    er->add_option("--M", eo.M, "upper bound constant");
    er->add_option("--L", eo.L, "upper bound constant");
    er->add_flag("--exp13", eo.exp13, "use the 13th-power log factor in the exp term");
    er->add_option("--n-lo", eo.n_lo, "fit range start");
    er->add_option("--n-hi", eo.n_hi, "fit range end");
    er->add_option("--replicates", eo.replicates, "Monte Carlo replicates")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    er->add_flag("--exact", eo.exact, "exact connectivity by recursion");
    er->add_flag("--mc", eo.mc, "Monte Carlo connectivity estimate");
    er->add_flag("--durrett", eo.durrett, "closed-form connectivity lower bound");
    er->add_flag("--upper", eo.upper, "nonconnectivity upper bound");
    er->add_flag("--fit", eo.fit, "fit upper bound constants on a range");
    er->add_flag("--tail", eo.tail, "binomial upper tail bound");
    er->add_flag("--exact-tail", eo.exact_tail, "exact binomial upper tail");
    er->add_flag("--kappa", eo.kappa, "optimized concentration constant");
    er->add_flag("--cor53", eo.cor53, "binomial concentration bound with derived kappa");
    add_io(er, io_er);

    CLI::App* as = app.add_subcommand("asymptotics", "closed-form scale asymptotics and bounds");
    as->add_option("--mode", ao.mode, "annulus | skip | rtilde | gianttail | gamma")
        ->check(CLI::IsMember({"annulus", "skip", "rtilde", "gianttail", "gamma"}));
    as->add_option("--case", ao.case_name, "annulus connection event, one of a..f")
        ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f"}));
    as->add_option("--N", ao.N, "hierarchy base")->check(CLI::Range(2, 1 << 20));
    as->add_option("--K", ao.K, "scale constant");
    as->add_option("--C", ao.C, "constant coefficient");
    as->add_option("--a", ao.a, "linear-in-log coefficient");
    as->add_option("--b", ao.b, "power coefficient");
    as->add_option("--n-lo", ao.n_lo, "first stage");
    as->add_option("--n-hi", ao.n_hi, "last stage");
    as->add_option("--j", ao.j, "annulus offset");
    as->add_option("--ell", ao.ell, "annulus width");
    as->add_option("--cluster-size", ao.cluster_size, "attacking cluster size");
    as->add_option("--M", ao.M, "bound constant");
    as->add_option("--lambda", ao.lambda, "expected cluster fraction, in (0,1)");
    as->add_option("--eps", ao.eps, "tail slack");
    as->add_option("--nv", ao.n_vertices, "vertex count for the giant-cluster tail");
    as->add_option("--delta", ao.delta, "connection exponent offset");
    as->add_option("--c", ao.c, "connection coefficient");
    as->add_option("--gamma", ao.gamma, "density exponent, in (0,1)");
    as->add_option("--p0", ao.p0, "starting success probability");
    as->add_option("--eta", ao.eta, "threshold slack");
    add_io(as, io_as);

    CLI::App* pre = app.add_subcommand("preperc", "pre-percolation annulus connection scan");
    add_profile(pre, po_pre);
    pre->add_option("--n-lo", qo.n_lo, "first stage")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1000000000}));
    pre->add_option("--n-hi", qo.n_hi, "last stage")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1000000000}));
    pre->add_flag("--sampled", qo.sampled, "draw one Bernoulli indicator per stage");
    add_io(pre, io_pre);

    std::vector<std::string> argv_vec;
    argv_vec.reserve(args.size() + 1);
    argv_vec.push_back("ultraperc");
    for (const auto& a : args) argv_vec.push_back(a);
    std::vector<char*> argv;
    argv.reserve(argv_vec.size());
    for (auto& s : argv_vec) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const std::pair<CLI::App*, IoOpts*> tied[] = {
            {sim, &io_sim}, {cas, &io_cas}, {mf, &io_mf},
            {er, &io_er},   {as, &io_as},   {pre, &io_pre}};
        for (const auto& [sub, io] : tied)
            if (sub->parsed() && !io->config.empty()) apply_config(sub, io->config);
        if (sim->parsed()) return run_simulate(po_sim, so, io_sim);
        if (cas->parsed()) {
            if (co.mode == "certificate") return run_cascade_certificate(po_cas.N, co, io_cas);
            return run_cascade_mc(po_cas, co, io_cas);
        }
        if (mf->parsed()) return run_meanfield(mo, io_mf);
        if (er->parsed()) return run_erconn(eo, io_er);
        if (as->parsed()) return run_asymptotics(ao, io_as);
        if (pre->parsed()) return run_preperc(po_pre, qo, io_pre);
    } catch (const infeasible_scale_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace ultraperc::cli
