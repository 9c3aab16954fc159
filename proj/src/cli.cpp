#include "d2k/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "d2k/match_counting.hpp"
#include "d2k/moment_theory.hpp"
#include "d2k/perturbed_binomial.hpp"
#include "d2k/sequence_model.hpp"
#include "d2k/simulation.hpp"
#include "d2k/version.hpp"

namespace d2k {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Options {
    std::optional<double> eta;
    std::string freqs_text;
    std::int64_t n = 0;
    int m = 0;
    int k = 0;
    int c = 0;
    std::string seq_a;
    std::string seq_b;
    std::string format;
    std::string out_path;
    std::int64_t reps = 1000;
    std::optional<std::uint64_t> seed_flag;
    std::string sigma_mode = "empirical";
    std::int64_t pilot_reps = 200;
    std::string n_list = "100,200,400,800,1600";
    std::string m_list = "2:14";
    std::string algo = "fast";
    int threads = 0;
    bool emit_samples = false;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) parts.push_back(item);
    return parts;
}

double parse_real(const std::string& text) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + text + "'");
    }
    if (pos != text.size()) throw UsageError("not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_freqs(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4)
        throw UsageError("--freqs needs four comma-separated values A,C,G,T");
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(parse_real(p));
    return out;
}

std::vector<std::int64_t> parse_list(const std::string& text, const char* flag) {
    std::vector<std::int64_t> out;
    for (const auto& item : split(text, ',')) {
        const auto colon = item.find(':');
        try {
            if (colon == std::string::npos) {
                out.push_back(std::stoll(item));
            } else {
                const std::int64_t lo = std::stoll(item.substr(0, colon));
                const std::int64_t hi = std::stoll(item.substr(colon + 1));
                if (lo > hi) throw UsageError(std::string(flag) + ": empty range " + item);
                for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
            }
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

bool has_model(const Options& o) { return o.eta.has_value() || !o.freqs_text.empty(); }

LetterDistribution resolve_model(const Options& o) {
    if (!has_model(o)) throw UsageError("a model is required: give --eta or --freqs");
    if (o.eta) {
        try {
            return strand_symmetric(*o.eta);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    const auto f = parse_freqs(o.freqs_text);
    try {
        return LetterDistribution::from_frequencies(f[0], f[1], f[2], f[3]);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::uint64_t resolve_seed(const Options& o) {
    if (o.seed_flag) return *o.seed_flag;
    if (const char* env = std::getenv("D2K_SEED")) {
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(env, &pos);
            if (pos != std::string(env).size()) throw std::invalid_argument(env);
            return v;
        } catch (const std::exception&) {
            throw UsageError(std::string("D2K_SEED is not an integer: '") + env + "'");
        }
    }
    return 1;
}

void apply_threads(const Options& o) {
    if (o.threads < 0) throw UsageError("--threads must be >= 1");
#ifdef _OPENMP
    if (o.threads > 0) omp_set_num_threads(o.threads);
#endif
}

Sequence load_or_usage(const std::string& path) {
    try {
        return load_sequence_file(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

SigmaMode parse_sigma_mode(const std::string& text) {
    if (text == "empirical") return SigmaMode::empirical;
    if (text == "pilot") return SigmaMode::pilot;
    throw UsageError("--sigma-mode must be empirical or pilot");
}

void deliver(const Options& o, std::ostream& out, const std::string& payload) {
    if (o.out_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw std::runtime_error(o.out_path + ": cannot write");
    f << payload;
}

ordered_json model_json(const Options& o) {
    ordered_json j;
    j["eta"] = o.eta ? ordered_json(*o.eta) : ordered_json(nullptr);
    if (o.freqs_text.empty()) {
        j["freqs"] = nullptr;
    } else {
        j["freqs"] = parse_freqs(o.freqs_text);
    }
    return j;
}

// Shared JSON schema of the mean/var-bounds/regime subcommands.
ordered_json moment_json(const LetterDistribution& dist, std::int64_t n, int m,
                         std::optional<int> k) {
    ordered_json j;
    MatchParams base(n, m, k.value_or(0));
    j["params"] = {{"n", n},
                   {"m", m},
                   {"k", k ? ordered_json(*k) : ordered_json(nullptr)},
                   {"n_bar", base.n_bar()}};
    j["eta"] = dist.has_eta() ? ordered_json(*dist.eta()) : ordered_json(nullptr);
    j["p2"] = collision_moment(dist, 2);
    j["p3"] = collision_moment(dist, 3);

    j["mean_exact"] = nullptr;
    j["mean_lower"] = nullptr;
    j["mean_upper"] = nullptr;
    j["ey_exact"] = nullptr;
    j["ey_lower"] = nullptr;
    j["ey_upper"] = nullptr;
    j["var_lower_dominant"] = nullptr;
    j["var_lower_valid"] = nullptr;
    j["var_upper"] = nullptr;
    j["var_lower_k0_general"] = nullptr;

    if (k) {
        const MatchParams p(n, m, *k);
        if (dist.has_eta()) {
            j["mean_exact"] = d2k_mean(dist, p);
            const auto [lo, hi] = d2k_mean_bounds(dist, p);
            j["mean_lower"] = lo;
            j["mean_upper"] = hi;
            j["ey_exact"] = indicator_mean(dist, p.m, p.k);
            const auto [el, eh] = indicator_mean_bounds(dist, p.m, p.k);
            j["ey_lower"] = el;
            j["ey_upper"] = eh;
            const auto vl = var_lower_dominant(dist, p);
            j["var_lower_dominant"] = vl.value;
            j["var_lower_valid"] = vl.valid;
            if (n > 2 * m) j["var_upper"] = var_upper(dist, p);
        } else {
            if (*k != 0)
                throw UsageError(
                    "general letter frequencies support k = 0 only; k > 0 theory "
                    "needs strand symmetry (--eta)");
            const double mean = d2k_mean_k0(dist, p);
            j["mean_exact"] = mean;
            j["mean_lower"] = mean;
            j["mean_upper"] = mean;
            const double ey = std::pow(collision_moment(dist, 2), m);
            j["ey_exact"] = ey;
            j["ey_lower"] = ey;
            j["ey_upper"] = ey;
        }
        if (*k == 0) j["var_lower_k0_general"] = var_lower_k0_general(dist, p);
    }

    const auto verdict = regime_classify(dist, n, m);
    j["alpha"] = verdict.alpha;
    j["log_base"] = verdict.log_base;
    j["flags"] = {{"theorem_normal", verdict.theorem_normal},
                  {"empirically_normal", verdict.empirically_normal},
                  {"poisson_regime_k0", verdict.poisson_regime_k0}};
    j["iso_lines"] = {{"m_alpha_half", iso_line_m(dist, n, 0.5)},
                      {"m_alpha_two", iso_line_m(dist, n, 2.0)}};
    return j;
}

ordered_json ks_json(const KsResult& ks) {
    return {{"d_statistic", ks.d_statistic},
            {"p_value", ks.p_value},
            {"n_samples", ks.n_samples},
            {"mean_used", ks.mean_used},
            {"sigma_used", ks.sigma_used}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

int do_count(const Options& o, std::ostream& out) {
    const Sequence a = load_or_usage(o.seq_a);
    const Sequence b = load_or_usage(o.seq_b);
    if (a.size() != b.size())
        throw UsageError("sequences must have equal length (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    MatchParams params(static_cast<std::int64_t>(a.size()), o.m, o.k);
    apply_threads(o);

    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t value = o.algo == "naive" ? d2k_naive(a, b, params)
                                                 : d2k_fast(a, b, params);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t0)
            .count();

    if (o.format == "json") {
        ordered_json j;
        j["version"] = kVersion;
        j["config"] = {{"subcommand", "count"}, {"seq_a", o.seq_a},
                       {"seq_b", o.seq_b},      {"m", o.m},
                       {"k", o.k},              {"algo", o.algo},
                       {"format", o.format},    {"threads", o.threads}};
        j["seed"] = nullptr;
        j["n"] = params.n;
        j["m"] = params.m;
        j["k"] = params.k;
        j["d2k"] = value;
        j["algo"] = o.algo;
        j["wall_ms"] = wall_ms;
        deliver(o, out, dump(j));
    } else {
        deliver(o, out, std::to_string(value) + "\n");
    }
    return 0;
}

int do_dist(const Options& o, std::ostream& out) {
    if (!o.eta) throw UsageError("dist needs --eta (strand-symmetric model only)");
    DistanceDistribution table;
    try {
        table = DistanceDistribution::compute(o.m, *o.eta, o.c);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (o.format == "json") {
        ordered_json j;
        j["version"] = kVersion;
        j["config"] = {{"subcommand", "dist"},
                       {"eta", *o.eta},
                       {"m", o.m},
                       {"c", o.c},
                       {"format", o.format}};
        j["seed"] = nullptr;
        ordered_json rows = ordered_json::array();
        for (int k = 0; k <= table.m; ++k)
            rows.push_back({{"k", k}, {"g", table.pmf[k]}, {"G", table.cdf[k]}});
        j["rows"] = rows;
        deliver(o, out, dump(j));
    } else {
        std::ostringstream csv;
        csv << "k,g,G\n";
        for (int k = 0; k <= table.m; ++k)
            csv << k << ',' << fmt17(table.pmf[k]) << ',' << fmt17(table.cdf[k])
                << '\n';
        deliver(o, out, csv.str());
    }
    return 0;
}

int do_moments(const Options& o, std::ostream& out, const std::string& name,
               std::optional<int> k) {
    const LetterDistribution dist = resolve_model(o);
    ordered_json j;
    j["version"] = kVersion;
    j["config"] = {{"subcommand", name},
                   {"model", model_json(o)},
                   {"n", o.n},
                   {"m", o.m},
                   {"k", k ? ordered_json(*k) : ordered_json(nullptr)},
                   {"format", "json"}};
    j["seed"] = nullptr;
    j.update(moment_json(dist, o.n, o.m, k));
    deliver(o, out, dump(j));
    return 0;
}

int do_simulate(const Options& o, std::ostream& out) {
    const LetterDistribution dist = resolve_model(o);
    const std::uint64_t seed = resolve_seed(o);
    apply_threads(o);
    const SimConfig config{dist,
                           MatchParams(o.n, o.m, o.k),
                           o.reps,
                           seed,
                           parse_sigma_mode(o.sigma_mode),
                           o.pilot_reps,
                           0};
    SimSummary s;
    try {
        s = simulate_cell(config);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    ordered_json j;
    j["version"] = kVersion;
    j["config"] = {{"subcommand", "simulate"},
                   {"model", model_json(o)},
                   {"n", o.n},
                   {"m", o.m},
                   {"k", o.k},
                   {"reps", o.reps},
                   {"seed", seed},
                   {"sigma_mode", o.sigma_mode},
                   {"pilot_reps", o.pilot_reps},
                   {"emit_samples", o.emit_samples},
                   {"threads", o.threads},
                   {"format", "json"}};
    j["seed"] = seed;
    j["alpha"] = regime_classify(dist, o.n, o.m).alpha;
    j["mean_exact"] = s.ks.mean_used;
    j["sample_mean"] = s.sample_mean;
    j["sample_var"] = s.sample_var;
    j["ks"] = ks_json(s.ks);
    if (o.emit_samples) j["samples"] = s.samples;
    deliver(o, out, dump(j));
    return 0;
}

int do_ks_grid(const Options& o, std::ostream& out) {
    if (o.out_path.empty())
        throw UsageError("ks-grid needs --out PATH (a provenance sidecar "
                         "PATH.json is written next to the CSV)");
    const LetterDistribution dist = resolve_model(o);
    const std::uint64_t seed = resolve_seed(o);
    apply_threads(o);

    GridSpec spec{parse_list(o.n_list, "--n-list"),
                  {},
                  o.k,
                  dist,
                  o.reps,
                  seed,
                  parse_sigma_mode(o.sigma_mode),
                  o.pilot_reps};
    for (std::int64_t m : parse_list(o.m_list, "--m-list"))
        spec.m_values.push_back(static_cast<int>(m));

    const KsGrid grid = run_ks_grid(spec);

    std::ostringstream csv;
    csv << "n,m,k,alpha,reps,d_stat,p_value,seed\n";
    for (const auto& cell : grid.cells)
        csv << cell.n << ',' << cell.m << ',' << spec.k << ','
            << fmt17(cell.alpha) << ',' << spec.replicates << ','
            << fmt17(cell.ks.d_statistic) << ',' << fmt17(cell.ks.p_value) << ','
            << seed << '\n';
    deliver(o, out, csv.str());

    ordered_json j;
    j["version"] = kVersion;
    j["config"] = {{"subcommand", "ks-grid"},
                   {"model", model_json(o)},
                   {"n_list", o.n_list},
                   {"m_list", o.m_list},
                   {"k", o.k},
                   {"reps", o.reps},
                   {"seed", seed},
                   {"sigma_mode", o.sigma_mode},
                   {"pilot_reps", o.pilot_reps},
                   {"threads", o.threads},
                   {"out", o.out_path},
                   {"format", "csv"}};
    j["seed"] = seed;
    ordered_json iso = ordered_json::array();
    for (const auto& line : grid.iso_lines)
        iso.push_back({{"n", line.n},
                       {"m_alpha_half", line.m_alpha_half},
                       {"m_alpha_two", line.m_alpha_two}});
    j["iso_lines"] = iso;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : grid.cells)
        cells.push_back({{"n", cell.n},
                         {"m", cell.m},
                         {"k", spec.k},
                         {"cell_index", cell.cell_index},
                         {"alpha", cell.alpha},
                         {"mean_exact", cell.mean_exact},
                         {"sample_mean", cell.sample_mean},
                         {"sample_var", cell.sample_var},
                         {"ks", ks_json(cell.ks)}});
    j["cells"] = cells;

    std::ofstream sidecar(o.out_path + ".json", std::ios::binary);
    if (!sidecar) throw std::runtime_error(o.out_path + ".json: cannot write");
    sidecar << dump(j);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    Options o;
    CLI::App app{"word-match statistics for DNA sequence pairs under the "
                 "strand-symmetric Bernoulli model"};
    app.name("d2k");
    app.set_version_flag("--version", kVersion);
    app.set_help_all_flag("--help-all", "print help for every subcommand");
    app.require_subcommand(1);

    const auto add_model = [&](CLI::App* sub, bool with_freqs) {
        auto* eta_opt = sub->add_option("--eta", o.eta,
                                        "strand-symmetry perturbation, |eta| < 1");
        if (with_freqs) {
            auto* freqs_opt =
                sub->add_option("--freqs", o.freqs_text,
                                "letter frequencies A,C,G,T (general model; k = 0 "
                                "results only)");
            eta_opt->excludes(freqs_opt);
            freqs_opt->excludes(eta_opt);
        }
    };
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_path, "write output to this file");
    };
    const auto add_format = [&](CLI::App* sub, const char* def) {
        o.format = def;
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };
    const auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", o.threads,
                        "cap worker threads (default: all available)");
    };
    const auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--reps", o.reps, "Monte Carlo replicates");
        sub->add_option("--seed", o.seed_flag,
                        "master seed (default: D2K_SEED env or 1)");
        sub->add_option("--sigma-mode", o.sigma_mode,
                        "standardization spread: empirical or pilot")
            ->check(CLI::IsMember({"empirical", "pilot"}));
        sub->add_option("--pilot-reps", o.pilot_reps,
                        "replicates of the pilot run (sigma-mode pilot)");
    };

    auto* count = app.add_subcommand("count", "count matching word windows of two sequences");
    count->add_option("--seq-a", o.seq_a, "first sequence file (plain ACGT)")->required();
    count->add_option("--seq-b", o.seq_b, "second sequence file (plain ACGT)")->required();
    count->add_option("-m", o.m, "word length")->required();
    count->add_option("-k", o.k, "mismatch budget (default 0)");
    count->add_option("--algo", o.algo, "naive reference or fast diagonal counter")
        ->check(CLI::IsMember({"naive", "fast"}));
    add_format(count, "csv");
    add_out(count);
    add_threads(count);

    auto* dist_cmd = app.add_subcommand(
        "dist", "mismatch-count distribution of a random word vs a query");
    add_model(dist_cmd, false);
    dist_cmd->add_option("-m", o.m, "word length")->required();
    dist_cmd->add_option("-c", o.c, "GC count of the query word")->required();
    add_format(dist_cmd, "csv");
    add_out(dist_cmd);

    auto* mean = app.add_subcommand("mean", "exact mean of the match count with bounds");
    add_model(mean, true);
    mean->add_option("-n", o.n, "sequence length")->required();
    mean->add_option("-m", o.m, "word length")->required();
    mean->add_option("-k", o.k, "mismatch budget (default 0)");
    add_out(mean);

    auto* var = app.add_subcommand("var-bounds", "variance bounds of the match count");
    add_model(var, true);
    var->add_option("-n", o.n, "sequence length")->required();
    var->add_option("-m", o.m, "word length")->required();
    var->add_option("-k", o.k, "mismatch budget (default 0)");
    add_out(var);

    auto* regime = app.add_subcommand(
        "regime", "normality regime of (n, m) on the alpha scale");
    add_model(regime, true);
    regime->add_option("-n", o.n, "sequence length")->required();
    regime->add_option("-m", o.m, "word length")->required();
    bool regime_k_given = false;
    regime->add_option("-k", o.k, "mismatch budget (adds mean/variance fields)")
        ->each([&](const std::string&) { regime_k_given = true; });
    add_out(regime);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo replicates with a normality KS test");
    add_model(simulate_cmd, true);
    simulate_cmd->add_option("-n", o.n, "sequence length")->required();
    simulate_cmd->add_option("-m", o.m, "word length")->required();
    simulate_cmd->add_option("-k", o.k, "mismatch budget (default 0)");
    add_sim(simulate_cmd);
    simulate_cmd->add_flag("--emit-samples", o.emit_samples,
                       "include the per-replicate counts in the JSON");
    add_out(simulate_cmd);
    add_threads(simulate_cmd);

    auto* grid = app.add_subcommand("ks-grid", "KS p-value grid over (n, m) cells");
    add_model(grid, true);
    grid->add_option("--n-list", o.n_list, "n values, comma list and a:b ranges");
    grid->add_option("--m-list", o.m_list, "m values, comma list and a:b ranges");
    grid->add_option("-k", o.k, "mismatch budget (default 0)");
    add_sim(grid);
    add_out(grid);
    add_threads(grid);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("d2k");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (count->parsed()) return do_count(o, out);
        if (dist_cmd->parsed()) return do_dist(o, out);
        if (mean->parsed()) return do_moments(o, out, "mean", o.k);
        if (var->parsed()) return do_moments(o, out, "var-bounds", o.k);
        if (regime->parsed())
            return do_moments(o, out, "regime",
                              regime_k_given ? std::optional<int>(o.k)
                                             : std::nullopt);
        if (simulate_cmd->parsed()) return do_simulate(o, out);
        if (grid->parsed()) return do_ks_grid(o, out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace d2k
