#include "d2k/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "d2k/detail/kahan.hpp"
#include "d2k/match_counting.hpp"
#include "d2k/moment_theory.hpp"

namespace d2k {

namespace {

void check_config(const SimConfig& config) {
    if (config.replicates < 2)
        throw std::invalid_argument("need at least 2 replicates");
    if (config.sigma_mode == SigmaMode::pilot && config.pilot_replicates < 2)
        throw std::invalid_argument("need at least 2 pilot replicates");
    if (!config.dist.has_eta() && config.params.k != 0)
        throw std::invalid_argument(
            "general letter frequencies support k = 0 only; k > 0 theory needs "
            "strand symmetry");
}

// lane bit keeps pilot streams disjoint from the main replicate streams
constexpr std::uint64_t kPilotLane = 0x8000000000000000ULL;

std::vector<std::int64_t> sample_lane(const SimConfig& config,
                                      std::int64_t replicates,
                                      std::uint64_t lane) {
    std::vector<std::int64_t> out(replicates);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < replicates; ++r) {
        SplitMix64 rng(substream_seed(config.seed, config.cell_index,
                                      lane | static_cast<std::uint64_t>(r)));
        const Sequence a = generate_sequence(config.dist, config.params.n, rng);
        const Sequence b = generate_sequence(config.dist, config.params.n, rng);
        out[r] = d2k_fast(a, b, config.params);
    }
    return out;
}

}  // namespace

Sequence generate_sequence(const LetterDistribution& dist, std::int64_t n,
                           SplitMix64& rng) {
    if (n < 1) throw std::invalid_argument("sequence length must be >= 1");
    const auto& xi = dist.frequencies();
    const double c0 = xi[0];
    const double c1 = c0 + xi[1];
    const double c2 = c1 + xi[2];
    std::vector<std::uint8_t> codes(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        codes[i] = u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3;
    }
    return Sequence::from_codes(codes);
}

std::vector<std::int64_t> sample_d2k(const SimConfig& config) {
    check_config(config);
    return sample_lane(config, config.replicates, 0);
}

double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double ks_statistic(const std::vector<double>& samples,
                    const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("need at least one sample");
    std::vector<double> xs(samples);
    std::sort(xs.begin(), xs.end());
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, static_cast<double>(i + 1) * inv_n - f);
        d = std::max(d, f - static_cast<double>(i) * inv_n);
    }
    return d;
}

double kolmogorov_pvalue(double d, std::int64_t n_samples) {
    if (n_samples < 1) throw std::invalid_argument("need at least one sample");
    if (!(d >= 0.0) || !(d <= 1.0))
        throw std::invalid_argument("KS distance must lie in [0, 1]");
    const double x = std::sqrt(static_cast<double>(n_samples)) * d;
    if (x < 1e-3) return 1.0;
    double q = 0.0;
    double sign = 1.0;
    for (int j = 1;; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        if (term < 1e-12) break;
        q += sign * term;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

double sample_mean(const std::vector<std::int64_t>& xs) {
    detail::KahanSum s;
    for (auto x : xs) s.add(static_cast<double>(x));
    return s.value() / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<std::int64_t>& xs) {
    if (xs.size() < 2)
        throw std::invalid_argument("sample variance needs >= 2 values");
    const double mu = sample_mean(xs);
    detail::KahanSum s;
    for (auto x : xs) {
        const double dx = static_cast<double>(x) - mu;
        s.add(dx * dx);
    }
    return s.value() / static_cast<double>(xs.size() - 1);
}

SimSummary simulate_cell(const SimConfig& config) {
    check_config(config);
    SimSummary out{sample_d2k(config), 0.0, 0.0, {}};
    out.sample_mean = sample_mean(out.samples);
    out.sample_var = sample_variance(out.samples);

    const double mu = config.dist.has_eta() ? d2k_mean(config.dist, config.params)
                                            : d2k_mean_k0(config.dist, config.params);
    double sigma;
    if (config.sigma_mode == SigmaMode::empirical) {
        sigma = std::sqrt(out.sample_var);
    } else {
        const auto pilot =
            sample_lane(config, config.pilot_replicates, kPilotLane);
        sigma = std::sqrt(sample_variance(pilot));
    }
    const double sigma_used = sigma > 0.0 ? sigma : 1.0;

    std::vector<double> z(out.samples.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = (static_cast<double>(out.samples[i]) - mu) / sigma_used;
    const double d = ks_statistic(z, standard_normal_cdf);
    out.ks = KsResult{d, kolmogorov_pvalue(d, config.replicates),
                      config.replicates, mu, sigma_used};
    return out;
}

KsGrid run_ks_grid(const GridSpec& spec) {
    if (spec.n_values.empty() || spec.m_values.empty())
        throw std::invalid_argument("grid needs at least one n and one m");
    KsGrid grid{spec, {}, {}};
    grid.cells.reserve(spec.n_values.size() * spec.m_values.size());
    for (std::size_t in = 0; in < spec.n_values.size(); ++in) {
        const std::int64_t n = spec.n_values[in];
        for (std::size_t im = 0; im < spec.m_values.size(); ++im) {
            const int m = spec.m_values[im];
            const std::uint64_t ci = in * spec.m_values.size() + im;
            try {
                SimConfig config{spec.dist,       MatchParams(n, m, spec.k),
                                 spec.replicates, spec.seed,
                                 spec.sigma_mode, spec.pilot_replicates,
                                 ci};
                SimSummary s = simulate_cell(config);
                const double alpha = regime_classify(spec.dist, n, m).alpha;
                grid.cells.push_back(KsCell{n, m, alpha, ci, s.ks.mean_used,
                                            s.sample_mean, s.sample_var, s.ks});
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "grid cell n=" << n << " m=" << m << " k=" << spec.k << ": "
                   << e.what();
                throw std::runtime_error(os.str());
            }
        }
    }
    for (std::int64_t n : spec.n_values)
        grid.iso_lines.push_back(IsoLine{n, iso_line_m(spec.dist, n, 0.5),
                                         iso_line_m(spec.dist, n, 2.0)});
    return grid;
}

namespace detail {

double normal_deviate(SplitMix64& rng) {
    // Box-Muller, two uniforms per deviate, u clamped away from 0
    const double u = std::max(rng.next_unit(), 0x1.0p-60);
    const double v = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace detail

}  // namespace d2k
