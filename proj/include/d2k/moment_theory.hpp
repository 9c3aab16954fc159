#pragma once

#include <utility>
#include <vector>

#include "d2k/sequence_model.hpp"

namespace d2k {

// Mean of the per-pair match indicator, exact via GC-count grouping.
double indicator_mean(const LetterDistribution& dist, int m, int k);
// Lower/upper bracket for the indicator mean; uses |eta|.
std::pair<double, double> indicator_mean_bounds(const LetterDistribution& dist,
                                                int m, int k);

// Exact mean of the word-match count and its bracket (n_bar^2 times above).
double d2k_mean(const LetterDistribution& dist, const MatchParams& p);
std::pair<double, double> d2k_mean_bounds(const LetterDistribution& dist,
                                          const MatchParams& p);
// k = 0 mean for an arbitrary letter distribution: n_bar^2 p2^m.
double d2k_mean_k0(const LetterDistribution& dist, const MatchParams& p);

// Distribution of the distance between two independent random t-words;
// entry l = Pr(distance = l), l = 0..t. t = 0 gives the point mass at 0.
std::vector<double> mismatch_distribution(const LetterDistribution& dist, int t);

// Conditional match profile for a crabgrass pair with overlap t: the match
// probability given the shared (m-t)-word has GC count c.
double crabgrass_profile(const LetterDistribution& dist, int m, int k, int t, int c);

// Exact covariance of two crabgrass-related indicators with overlap t
// (variance of the profile over the random shared word).
double crabgrass_cov(const LetterDistribution& dist, int m, int k, int t);

// Uniform bound on |Cov| valid for every dependent pair; uses |eta|.
double accordion_cov_bound(const LetterDistribution& dist, int m, int k);

struct VarLowerBound {
    double value;
    // the dominant crabgrass term needs m >= 2 and n_bar >= 2(2m-1) to be
    // meaningful; outside that range the literal value is still reported
    bool valid;
};

// Dominant computable lower bound on Var (edge-overlap crabgrass mass).
VarLowerBound var_lower_dominant(const LetterDistribution& dist, const MatchParams& p);
// Three-term upper bound on Var; uses |eta|, needs n > 2m.
double var_upper(const LetterDistribution& dist, const MatchParams& p);
// k = 0 lower bound valid for any nonuniform letter distribution.
double var_lower_k0_general(const LetterDistribution& dist, const MatchParams& p);

struct RegimeVerdict {
    double alpha;
    bool theorem_normal;      // alpha < 1/2
    bool empirically_normal;  // alpha < 2
    bool poisson_regime_k0;   // alpha >= 2 (informational, exact matching)
    double log_base;          // 1/p2
};

// Word-length regime on the m = alpha * log_{1/p2}(n) scale.
RegimeVerdict regime_classify(const LetterDistribution& dist, std::int64_t n, int m);

// m value of the iso-line at a given alpha for this n.
double iso_line_m(const LetterDistribution& dist, std::int64_t n, double alpha);

// Normal-approximation driver (N/M)^{1/t} * M / sigma.
double janson_diagnostic(const MatchParams& p, double sigma, int t);

struct MomentReport {
    MatchParams params;
    LetterDistribution dist;
    double ey_exact;
    double ey_lower;
    double ey_upper;
    double mean_exact;
    double mean_lower;
    double mean_upper;
    double var_lower_dominant;
    bool var_lower_valid;
    double var_upper;
};

MomentReport make_moment_report(const LetterDistribution& dist, const MatchParams& p);

namespace detail {

// Binomial(m, (1-eta)/2) pmf: weight of GC count c among random m-words.
std::vector<double> gc_weights(int m, double eta);

}  // namespace detail

}  // namespace d2k
