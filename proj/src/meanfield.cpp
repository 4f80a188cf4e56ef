#include "ultraperc/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "ultraperc/numeric.hpp"

namespace ultraperc::meanfield {

double seq_value(const Sequence& s, std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("sequence index k must be >= 1");
    if (const auto* c = std::get_if<ConstantSeq>(&s)) return c->c;
    if (const auto* al = std::get_if<ALogK>(&s))
        return al->a * std::log(static_cast<double>(k) + al->offset);
    const auto& tab = std::get<TableSeq>(s);
    if (k > tab.c.size())
        throw std::invalid_argument("sequence index k beyond the table horizon");
    return tab.c[k - 1];
}

double survival_beta(double lambda) {
    if (!(lambda > 1.0)) return 0.0;
    auto g = [lambda](double b) { return -std::expm1(-lambda * b) - b; };
    double lo = 1e-12, hi = 1.0;
    if (g(lo) <= 0.0) return 0.0;  // root below the bracket, within tolerance
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

void standing_warnings(const Sequence& c, std::vector<std::string>& out) {
    const double c1 = seq_value(c, 1);
    if (!(c1 > 2.0 * std::log(2.0)))
        out.push_back("warning: c_1 <= 2 ln 2, below the standing assumption");
    bool have_c2 = true;
    double c2 = 0.0;
    try {
        c2 = seq_value(c, 2);
    } catch (const std::invalid_argument&) {
        have_c2 = false;
    }
    if (have_c2 && !(c2 > 8.0 * std::log(2.0)))
        out.push_back("warning: c_2 <= 8 ln 2, below the standing assumption");
}

}  // namespace

BetaSequence beta_sequence(const Sequence& c, std::uint64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("horizon kmax must be >= 1");
    BetaSequence r;
    r.lambda.reserve(kmax);
    r.beta.reserve(kmax);
    r.partial_product.reserve(kmax);
    standing_warnings(c, r.warnings);
    double beta_prev = 1.0;
    double product = 1.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        const double lam = seq_value(c, k) * beta_prev * beta_prev;
        const double b = survival_beta(lam);
        if (!r.extinct && lam <= 1.0) {
            r.extinct = true;
            r.extinct_at = k;
        }
        product *= b;
        r.lambda.push_back(lam);
        r.beta.push_back(b);
        r.partial_product.push_back(product);
        beta_prev = b;
    }
    return r;
}

PercolationEstimate percolation_probability(const Sequence& c, std::uint64_t kmax,
                                            double tol) {
    const BetaSequence seq = beta_sequence(c, kmax);
    PercolationEstimate e;
    e.kmax = kmax;
    e.extinct = seq.extinct;
    e.warnings = seq.warnings;
    e.product = seq.partial_product.back();
    const std::uint64_t window_start = kmax - kmax / 10;  // last 10% of [1, kmax]
    bool ok = true;
    KahanSum defect;
    for (std::uint64_t k = window_start + 1; k <= kmax; ++k) {
        const double inc =
            seq.partial_product[k - 2] - seq.partial_product[k - 1];
        if (!(inc < tol)) ok = false;
        defect.add(1.0 - seq.beta[k - 1]);
    }
    e.converged = ok;
    e.tail_defect = defect.value();
    return e;
}

SummabilityReport exp_summability(const Sequence& c, std::uint64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("horizon kmax must be >= 1");
    SummabilityReport r;
    r.partial_sums.reserve(kmax);
    KahanSum s;
    double max_last_decade_inc = 0.0;
    const std::uint64_t d1 = kmax / 10, d2 = kmax / 100;
    double s_at_d1 = 0.0, s_at_d2 = 0.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        const double inc = std::exp(-seq_value(c, k));
        s.add(inc);
        r.partial_sums.push_back(s.value());
        if (k == d2) s_at_d2 = s.value();
        if (k == d1) s_at_d1 = s.value();
        if (k > d1 && inc > max_last_decade_inc) max_last_decade_inc = inc;
    }
    r.total = s.value();
    r.decade_mass_last = r.total - s_at_d1;
    r.decade_mass_prev = s_at_d1 - s_at_d2;
    r.decade_ratio = r.decade_mass_prev > 0.0
                         ? r.decade_mass_last / r.decade_mass_prev
                         : (r.decade_mass_last > 0.0 ? std::numeric_limits<double>::infinity()
                                                     : 0.0);
    r.summable_at_horizon = r.decade_ratio < 0.7;
    r.cauchy_1e9 = max_last_decade_inc < 1e-9;
    return r;
}

}  // namespace ultraperc::meanfield
