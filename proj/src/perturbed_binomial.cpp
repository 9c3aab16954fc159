#include "d2k/perturbed_binomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2k/detail/kahan.hpp"

namespace d2k {

namespace {

void check_eta(double eta) {
    if (!(std::abs(eta) < 1.0))
        throw std::domain_error("eta must satisfy |eta| < 1");
}

void check_mc(int m, int c) {
    if (m < 0) throw std::invalid_argument("word length must be >= 0");
    if (c < 0 || c > m)
        throw std::invalid_argument("GC count c must satisfy 0 <= c <= m");
}

}  // namespace

double binom(int n, int a) {
    if (a < 0 || a > n) return 0.0;
    if (n <= 60) {
        unsigned __int128 num = 1;
        const int b = std::min(a, n - a);
        for (int i = 1; i <= b; ++i) {
            num *= static_cast<unsigned>(n - b + i);
            num /= static_cast<unsigned>(i);
        }
        return static_cast<double>(num);
    }
    return std::exp(log_binom(n, a));
}

double log_binom(int n, int a) {
    if (a < 0 || a > n)
        throw std::invalid_argument("log_binom: index out of range");
    return std::lgamma(n + 1.0) - std::lgamma(a + 1.0) - std::lgamma(n - a + 1.0);
}

double word_probability(int m, double eta, int c) {
    check_eta(eta);
    check_mc(m, c);
    if (m <= detail::kDirectEvalMaxM)
        return std::pow(0.25, m) * std::pow(1.0 - eta, c) * std::pow(1.0 + eta, m - c);
    return std::exp(-m * std::log(4.0) + c * std::log1p(-eta) + (m - c) * std::log1p(eta));
}

namespace detail {

double perturbed_binomial_pmf_direct(int k, int m, double eta, int c) {
    const double ra = (3.0 + eta) / (1.0 - eta);
    const double rb = (3.0 - eta) / (1.0 + eta);
    const int lo = std::max(0, c - k);
    const int hi = std::min(c, m - k);
    KahanSum u;
    for (int i = lo; i <= hi; ++i)
        u.add(binom(c, i) * binom(m - c, m - k - i) *
              std::pow(ra, c - i) * std::pow(rb, k - c + i));
    return word_probability(m, eta, c) * u.value();
}

double perturbed_binomial_pmf_log(int k, int m, double eta, int c) {
    const double log_ra = std::log(3.0 + eta) - std::log1p(-eta);
    const double log_rb = std::log(3.0 - eta) - std::log1p(eta);
    const int lo = std::max(0, c - k);
    const int hi = std::min(c, m - k);
    std::vector<double> terms;
    terms.reserve(hi - lo + 1);
    double peak = -HUGE_VAL;
    for (int i = lo; i <= hi; ++i) {
        const double t = log_binom(c, i) + log_binom(m - c, m - k - i) +
                         (c - i) * log_ra + (k - c + i) * log_rb;
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    detail::KahanSum s;
    for (double t : terms) s.add(std::exp(t - peak));
    const double log_h =
        -m * std::log(4.0) + c * std::log1p(-eta) + (m - c) * std::log1p(eta);
    return std::exp(log_h + peak + std::log(s.value()));
}

}  // namespace detail

double perturbed_binomial_pmf(int k, int m, double eta, int c) {
    check_eta(eta);
    check_mc(m, c);
    if (k < 0 || k > m)
        throw std::invalid_argument("mismatch count k must satisfy 0 <= k <= m");
    if (m <= detail::kDirectEvalMaxM)
        return detail::perturbed_binomial_pmf_direct(k, m, eta, c);
    return detail::perturbed_binomial_pmf_log(k, m, eta, c);
}

double perturbed_binomial_cdf(int k, int m, double eta, int c) {
    check_eta(eta);
    check_mc(m, c);
    if (k < 0 || k > m)
        throw std::invalid_argument("mismatch count k must satisfy 0 <= k <= m");
    detail::KahanSum s;
    for (int r = 0; r <= k; ++r) s.add(perturbed_binomial_pmf(r, m, eta, c));
    return s.value();
}

double binomial_pmf(int k, int m, double rho) {
    if (k < 0 || k > m)
        throw std::invalid_argument("binomial_pmf: k out of range");
    if (!(rho >= 0.0) || !(rho <= 1.0))
        throw std::invalid_argument("binomial_pmf: rho must lie in [0, 1]");
    return binom(m, k) * std::pow(rho, m - k) * std::pow(1.0 - rho, k);
}

DistanceDistribution DistanceDistribution::compute(int m, double eta, int c) {
    check_eta(eta);
    check_mc(m, c);
    DistanceDistribution d;
    d.m = m;
    d.eta = eta;
    d.c = c;
    d.pmf.resize(m + 1);
    d.cdf.resize(m + 1);
    detail::KahanSum acc;
    for (int k = 0; k <= m; ++k) {
        d.pmf[k] = perturbed_binomial_pmf(k, m, eta, c);
        acc.add(d.pmf[k]);
        d.cdf[k] = acc.value();
    }
    return d;
}

}  // namespace d2k
