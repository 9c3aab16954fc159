#pragma once

#include <vector>

namespace d2k {

// Binomial coefficient as a double; exact (128-bit integer) for n <= 60,
// lgamma based above that. Zero outside 0 <= a <= n.
double binom(int n, int a);
double log_binom(int n, int a);

// Probability that a random strand-symmetric word of length m has GC count c.
double word_probability(int m, double eta, int c);

// Mismatch-count distribution of a random word against a fixed word of GC
// count c: a binomial pmf perturbed by the GC composition. pmf(k) is the
// probability of exactly k mismatching positions, cdf(k) of at most k.
double perturbed_binomial_pmf(int k, int m, double eta, int c);
double perturbed_binomial_cdf(int k, int m, double eta, int c);

// Plain binomial reference: rho = per-letter match probability, k = number
// of mismatches among m letters.
double binomial_pmf(int k, int m, double rho);

// Full pmf/cdf table for one (m, eta, c).
struct DistanceDistribution {
    int m;
    double eta;
    int c;
    std::vector<double> pmf;  // index k = 0..m
    std::vector<double> cdf;

    static DistanceDistribution compute(int m, double eta, int c);
};

namespace detail {

inline constexpr int kDirectEvalMaxM = 30;

double perturbed_binomial_pmf_direct(int k, int m, double eta, int c);
double perturbed_binomial_pmf_log(int k, int m, double eta, int c);

}  // namespace detail

}  // namespace d2k
