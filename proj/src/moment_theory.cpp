#include "d2k/moment_theory.hpp"

#include <cmath>
#include <stdexcept>

#include "d2k/detail/kahan.hpp"
#include "d2k/perturbed_binomial.hpp"

namespace d2k {

namespace detail {

std::vector<double> gc_weights(int m, double eta) {
    const double q = (1.0 - eta) / 2.0;
    std::vector<double> w(m + 1);
    if (m <= 60) {
        for (int c = 0; c <= m; ++c)
            w[c] = binom(m, c) * std::pow(q, c) * std::pow(1.0 - q, m - c);
    } else {
        for (int c = 0; c <= m; ++c)
            w[c] = std::exp(log_binom(m, c) + c * std::log(q) +
                            (m - c) * std::log(1.0 - q));
    }
    return w;
}

}  // namespace detail

namespace {

// Partial sum p2^m * sum_{r<=k} C(m,r) ratio^r shared by the mean bounds,
// the accordion bound and the var upper bound's third term.
double bound_series(double p2, int m, int k, double ratio) {
    detail::KahanSum s;
    for (int r = 0; r <= k; ++r) s.add(binom(m, r) * std::pow(ratio, r));
    return std::pow(p2, m) * s.value();
}

double ratio_low(double eta_abs) { return (3.0 - eta_abs) / (1.0 + eta_abs); }
double ratio_high(double eta_abs) { return (3.0 + eta_abs) / (1.0 - eta_abs); }

void check_mk(int m, int k) {
    if (m < 1) throw std::invalid_argument("word length m must be >= 1");
    if (k < 0 || k > m)
        throw std::invalid_argument("mismatch budget k must satisfy 0 <= k <= m");
}

// f_t at GC count c given a precomputed overhang distance distribution.
double profile_value(const std::vector<double>& delta, int m, int k, int t,
                     double eta, int c) {
    const int mt = m - t;
    detail::KahanSum s;
    for (int l = 0; l <= t; ++l) {
        const int kk = k - l;
        double gval;
        if (kk < 0)
            gval = 0.0;
        else if (kk >= mt)
            gval = 1.0;
        else
            gval = perturbed_binomial_cdf(kk, mt, eta, c);
        s.add(delta[l] * gval);
    }
    return s.value();
}

}  // namespace

double indicator_mean(const LetterDistribution& dist, int m, int k) {
    const double eta = dist.require_eta("indicator_mean");
    check_mk(m, k);
    const auto w = detail::gc_weights(m, eta);
    detail::KahanSum s;
    for (int c = 0; c <= m; ++c)
        s.add(w[c] * perturbed_binomial_cdf(k, m, eta, c));
    return s.value();
}

std::pair<double, double> indicator_mean_bounds(const LetterDistribution& dist,
                                                int m, int k) {
    const double eta_abs = std::abs(dist.require_eta("indicator_mean_bounds"));
    check_mk(m, k);
    const double p2 = collision_moment(dist, 2);
    return {bound_series(p2, m, k, ratio_low(eta_abs)),
            bound_series(p2, m, k, ratio_high(eta_abs))};
}

double d2k_mean(const LetterDistribution& dist, const MatchParams& p) {
    const double nbar = static_cast<double>(p.n_bar());
    return nbar * nbar * indicator_mean(dist, p.m, p.k);
}

std::pair<double, double> d2k_mean_bounds(const LetterDistribution& dist,
                                          const MatchParams& p) {
    const double nbar = static_cast<double>(p.n_bar());
    const auto [lo, hi] = indicator_mean_bounds(dist, p.m, p.k);
    return {nbar * nbar * lo, nbar * nbar * hi};
}

double d2k_mean_k0(const LetterDistribution& dist, const MatchParams& p) {
    if (p.k != 0)
        throw std::invalid_argument("general-alphabet mean is available for k = 0 only");
    const double nbar = static_cast<double>(p.n_bar());
    return nbar * nbar * std::pow(collision_moment(dist, 2), p.m);
}

std::vector<double> mismatch_distribution(const LetterDistribution& dist, int t) {
    const double eta = dist.require_eta("mismatch_distribution");
    if (t < 0) throw std::invalid_argument("overhang t must be >= 0");
    if (t == 0) return {1.0};
    const auto w = detail::gc_weights(t, eta);
    std::vector<detail::KahanSum> acc(t + 1);
    for (int c = 0; c <= t; ++c) {
        // weight * pmf = C(t,c) 2^t h^2 u_l: the pmf already carries one h
        const auto dd = DistanceDistribution::compute(t, eta, c);
        for (int l = 0; l <= t; ++l) acc[l].add(w[c] * dd.pmf[l]);
    }
    std::vector<double> out(t + 1);
    for (int l = 0; l <= t; ++l) out[l] = acc[l].value();
    return out;
}

double crabgrass_profile(const LetterDistribution& dist, int m, int k, int t, int c) {
    const double eta = dist.require_eta("crabgrass_profile");
    check_mk(m, k);
    if (t < 0 || t > m - 1)
        throw std::invalid_argument("overlap t must satisfy 0 <= t <= m-1");
    if (c < 0 || c > m - t)
        throw std::invalid_argument("GC count c must satisfy 0 <= c <= m-t");
    return profile_value(mismatch_distribution(dist, t), m, k, t, eta, c);
}

double crabgrass_cov(const LetterDistribution& dist, int m, int k, int t) {
    const double eta = dist.require_eta("crabgrass_cov");
    check_mk(m, k);
    if (t < 0 || t > m - 1)
        throw std::invalid_argument("overlap t must satisfy 0 <= t <= m-1");
    const auto delta = mismatch_distribution(dist, t);
    const int mt = m - t;
    const auto w = detail::gc_weights(mt, eta);
    std::vector<double> f(mt + 1);
    detail::KahanSum mean;
    for (int c = 0; c <= mt; ++c) {
        f[c] = profile_value(delta, m, k, t, eta, c);
        mean.add(w[c] * f[c]);
    }
    const double mu = mean.value();
    detail::KahanSum var;
    for (int c = 0; c <= mt; ++c) var.add(w[c] * (f[c] - mu) * (f[c] - mu));
    return var.value();
}

double accordion_cov_bound(const LetterDistribution& dist, int m, int k) {
    const double eta_abs = std::abs(dist.require_eta("accordion_cov_bound"));
    check_mk(m, k);
    const double p2 = collision_moment(dist, 2);
    return bound_series(p2, m, k, ratio_high(eta_abs));
}

VarLowerBound var_lower_dominant(const LetterDistribution& dist,
                                 const MatchParams& p) {
    const double eta_abs = std::abs(dist.require_eta("var_lower_dominant"));
    const double p2 = collision_moment(dist, 2);
    const double p3 = collision_moment(dist, 3);
    const double nbar = static_cast<double>(p.n_bar());
    const double edge = binom(p.m - 1, p.k) * std::pow(ratio_low(eta_abs), p.k);
    const double value = 2.0 * nbar * nbar * (2.0 * nbar - 4.0 * p.m + 2.0) *
                         edge * edge * std::pow(p2, 2 * p.m) *
                         (p3 / (p2 * p2) - 1.0);
    // m = 1 puts the extreme overlap at offset 0, where the two windows of
    // the pair coincide and the left/right doubling in the prefactor counts
    // each pair twice; the value is reported but flagged vacuous there
    const bool valid = p.m >= 2 && p.n_bar() >= 2 * (2 * p.m - 1);
    return {value > 0.0 ? value : 0.0, valid};
}

double var_upper(const LetterDistribution& dist, const MatchParams& p) {
    const double eta_abs = std::abs(dist.require_eta("var_upper"));
    if (p.n <= 2 * p.m)
        throw std::invalid_argument("var_upper requires n > 2m");
    const double p2 = collision_moment(dist, 2);
    const double p3 = collision_moment(dist, 3);
    const double nbar = static_cast<double>(p.n_bar());
    const double n2 = nbar * nbar;
    const double f24 = 2.0 * nbar - 4.0 * p.m + 2.0;
    const double ra = ratio_high(eta_abs);

    const double crab_p3 =
        2.0 * p3 * (1.0 - std::pow(p3, p.m)) / (1.0 - p3) - std::pow(p3, p.m);
    const double p22 = p2 * p2;
    const double crab_p2 =
        2.0 * p22 * (1.0 - std::pow(p22, p.m)) / (1.0 - p22) - std::pow(p22, p.m);

    const double term1 = n2 * f24 * std::pow(static_cast<double>(p.m), 2 * p.k) *
                         std::pow(ra, 2 * p.k) * crab_p3;
    const double term2 = n2 * f24 * crab_p2;
    const double term3 = n2 * (2.0 * p.m - 1.0) * (2.0 * p.m - 1.0) *
                         bound_series(p2, p.m, p.k, ra);
    return term1 - term2 + term3;
}

double var_lower_k0_general(const LetterDistribution& dist, const MatchParams& p) {
    if (p.k != 0)
        throw std::invalid_argument("general-alphabet variance bound needs k = 0");
    const double p2 = collision_moment(dist, 2);
    const double p3 = collision_moment(dist, 3);
    const double nbar = static_cast<double>(p.n_bar());
    const double crab = (2.0 * p.m - 1.0) * (2.0 * nbar - 4.0 * p.m + 2.0) *
                        std::pow(p2, 2 * p.m) * (p3 / (p2 * p2) - 1.0);
    const double solo = std::pow(p2, p.m) *
                        ((1.0 + p2 - 2.0 * p2 * p2) / (1.0 - p2) -
                         (2.0 * p.m - 1.0) * std::pow(p2, p.m));
    return nbar * nbar * (crab + solo);
}

RegimeVerdict regime_classify(const LetterDistribution& dist, std::int64_t n, int m) {
    if (m < 1 || n <= m)
        throw std::invalid_argument("regime needs n > m >= 1");
    const double p2 = collision_moment(dist, 2);
    if (!(p2 < 1.0))
        throw std::domain_error("regime needs p2 < 1 (non-degenerate distribution)");
    const double alpha =
        m * std::log(1.0 / p2) / std::log(static_cast<double>(n));
    return {alpha, alpha < 0.5, alpha < 2.0, alpha >= 2.0, 1.0 / p2};
}

double iso_line_m(const LetterDistribution& dist, std::int64_t n, double alpha) {
    const double p2 = collision_moment(dist, 2);
    if (!(p2 < 1.0))
        throw std::domain_error("iso-line needs p2 < 1");
    return alpha * std::log(static_cast<double>(n)) / std::log(1.0 / p2);
}

double janson_diagnostic(const MatchParams& p, double sigma, int t) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    const double nbar = static_cast<double>(p.n_bar());
    const double N = nbar * nbar;
    const double M = (2.0 * p.m - 1.0) * (2.0 * nbar - 2.0 * p.m + 1.0);
    return std::pow(N / M, 1.0 / t) * M / sigma;
}

MomentReport make_moment_report(const LetterDistribution& dist, const MatchParams& p) {
    const double ey = indicator_mean(dist, p.m, p.k);
    const auto [eyl, eyh] = indicator_mean_bounds(dist, p.m, p.k);
    const double nbar = static_cast<double>(p.n_bar());
    const double n2 = nbar * nbar;
    const auto vl = var_lower_dominant(dist, p);
    return MomentReport{p,       dist,     ey,       eyl,       eyh,
                        n2 * ey, n2 * eyl, n2 * eyh, vl.value,  vl.valid,
                        var_upper(dist, p)};
}

}  // namespace d2k
