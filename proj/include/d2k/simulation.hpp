#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "d2k/rng.hpp"
#include "d2k/sequence_model.hpp"

namespace d2k {

// n i.i.d. letters from dist, consuming one uniform draw per letter.
Sequence generate_sequence(const LetterDistribution& dist, std::int64_t n,
                           SplitMix64& rng);

enum class SigmaMode { empirical, pilot };

struct SimConfig {
    LetterDistribution dist;
    MatchParams params;
    std::int64_t replicates;
    std::uint64_t seed;
    SigmaMode sigma_mode = SigmaMode::empirical;
    std::int64_t pilot_replicates = 200;
    // position of this cell inside a grid; standalone runs use 0
    std::uint64_t cell_index = 0;
};

// Monte Carlo replicates of the match count, one fresh (A, B) pair each.
// Replicate r draws from substream (seed, cell_index, r), so any parallel
// schedule returns the identical vector.
std::vector<std::int64_t> sample_d2k(const SimConfig& config);

double standard_normal_cdf(double x);

// One-sample KS distance between the empirical CDF and `cdf`, evaluated at
// the sorted sample points (both one-sided gaps at each jump).
double ks_statistic(const std::vector<double>& samples,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov tail: Q(sqrt(N) d), clamped to [0,1].
double kolmogorov_pvalue(double d, std::int64_t n_samples);

struct KsResult {
    double d_statistic;
    double p_value;
    std::int64_t n_samples;
    double mean_used;
    double sigma_used;
};

struct SimSummary {
    std::vector<std::int64_t> samples;
    double sample_mean;
    double sample_var;  // N-1 convention
    KsResult ks;
};

// Sample one cell, standardize by (exact mean, sigma per mode) and KS-test
// against the standard normal. A degenerate sample (zero spread) falls back
// to sigma 1 so the test reports the honest mismatch instead of dividing
// by zero.
SimSummary simulate_cell(const SimConfig& config);

struct GridSpec {
    std::vector<std::int64_t> n_values;
    std::vector<int> m_values;
    int k;
    LetterDistribution dist;
    std::int64_t replicates;
    std::uint64_t seed;
    SigmaMode sigma_mode = SigmaMode::empirical;
    std::int64_t pilot_replicates = 200;
};

struct KsCell {
    std::int64_t n;
    int m;
    double alpha;
    std::uint64_t cell_index;
    double mean_exact;
    double sample_mean;
    double sample_var;
    KsResult ks;
};

struct IsoLine {
    std::int64_t n;
    double m_alpha_half;  // m with alpha = 1/2 at this n
    double m_alpha_two;   // m with alpha = 2
};

struct KsGrid {
    GridSpec spec;
    std::vector<KsCell> cells;  // row-major, n outer, m inner
    std::vector<IsoLine> iso_lines;
};

// Cell (i_n, i_m) uses cell_index = i_n * |m_values| + i_m, which fixes the
// seed derivation independent of evaluation order.
KsGrid run_ks_grid(const GridSpec& spec);

double sample_mean(const std::vector<std::int64_t>& xs);
double sample_variance(const std::vector<std::int64_t>& xs);

namespace detail {

// Box-Muller deviate; test-only consumer (KS calibration against a true
// normal sample), two uniforms per call.
double normal_deviate(SplitMix64& rng);

}  // namespace detail

}  // namespace d2k
