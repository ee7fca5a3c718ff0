// hhsim: command-line front end for the house-hunting simulator.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "hh/engine.hpp"
#include "hh/harness.hpp"
#include "hh/lemma.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

constexpr const char* kOutDirEnv = "HHSIM_OUT_DIR";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative --out paths resolve against HHSIM_OUT_DIR when it is set.
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = fs::path(dir) / p;
    }
    return p;
}

// Writes to --out if given, otherwise stdout.
template <typename F>
void emit(const std::string& out, F&& write) {
    if (out.empty() || out == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    const auto path = resolve_out(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    write(file);
    if (!file) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::vector<std::uint8_t> parse_quality_list(const std::string& text) {
    std::vector<std::uint8_t> q;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item == "0" || item == "1")
            q.push_back(static_cast<std::uint8_t>(item[0] - '0'));
        else
            throw UsageError(fmt::format("bad quality '{}' in list (expected 0 or 1)", item));
    }
    return q;
}

// Explicit 0/1 list or a named pattern; random patterns draw from a stream
// derived from the run seed.
std::vector<std::uint8_t> resolve_qualities(const std::string& text, std::uint32_t k, std::uint64_t seed) {
    if (!text.empty() && (text[0] == '0' || text[0] == '1')) {
        auto q = parse_quality_list(text);
        if (q.size() != k) throw UsageError(fmt::format("--qualities lists {} values but k = {}", q.size(), k));
        return q;
    }
    hh::QualityPattern pattern;
    try {
        pattern = hh::QualityPattern::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    hh::Rng rng(hh::derive_seed(seed, 0x717561));
    return pattern.draw(k, rng);
}

// Expands `--config FILE` (key=value lines, keys named like the long flags)
// into flags placed right after the subcommand name. Flags given on the
// command line take precedence over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return a == "--config" || a.rfind("--config=", 0) == 0;
    });
    if (it == args.end()) return args;
    std::string file;
    if (*it == "--config") {
        if (std::next(it) == args.end()) throw UsageError("--config needs a file");
        file = *std::next(it);
        args.erase(it, std::next(it, 2));
    } else {
        file = it->substr(9);
        args.erase(it);
    }
    std::ifstream in(file);
    if (!in) throw UsageError(fmt::format("cannot read config file {}", file));

    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
    }
    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key=value", file, lineno));
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (given.count(key)) continue;
        extra.push_back(fmt::format("--{}={}", key, value));
    }
    // args[0] is the program name; the subcommand (and lemma name) follow.
    std::size_t pos = 1;
    while (pos < args.size() && args[pos].rfind("-", 0) != 0) ++pos;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), extra.begin(), extra.end());
    return args;
}

struct RunArgs {
    std::string algo = "simple";
    std::uint32_t n = 0;
    std::uint32_t k = 1;
    std::string qualities = "one-good";
    std::uint64_t seed = 0;
    std::uint32_t max_rounds = 0;
    std::uint32_t extra_rounds = 0;
    std::string out;
    bool verbose = false;
};

struct SweepArgs {
    std::string algo = "simple";
    std::vector<std::uint32_t> ns;
    std::vector<std::uint32_t> ks{1};
    std::string qualities = "one-good";
    std::uint64_t seed = 0;
    std::uint32_t trials = 20;
    std::uint32_t max_rounds = 0;
    std::uint32_t extra_rounds = 0;
    unsigned threads = 0;
    std::string out;
};

struct LemmaArgs {
    std::uint32_t n = 0;
    std::uint32_t k = 2;
    std::vector<std::uint32_t> sizes;
    std::vector<std::uint32_t> passive;
    std::uint32_t rounds = 0;
    std::uint32_t small = 0;
    std::string mode = "exact";
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    double c = 1.0;
    double d = 64.0;
    std::string out;
};

struct FitArgs {
    std::string in;
    std::string model = "log";
    std::string algo;
    std::vector<std::uint32_t> ks;
    double min_r2 = -1.0;
    std::string out;
};

hh::Algorithm algo_of(const std::string& name) {
    try {
        return hh::parse_algorithm(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

int cmd_run(const RunArgs& a) {
    hh::ColonyConfig cfg;
    cfg.algorithm = algo_of(a.algo);
    cfg.n = a.n;
    cfg.k = a.k;
    cfg.seed = a.seed;
    cfg.max_rounds = a.max_rounds;
    cfg.qualities = resolve_qualities(a.qualities, a.k, a.seed);
    try {
        for (const auto& w : cfg.validate()) fmt::print(stderr, "warning: {}\n", w);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto result = hh::run(cfg, {.record_trace = true, .verbose = a.verbose, .extra_rounds = a.extra_rounds});
    emit(a.out, [&](std::ostream& os) { hh::write_jsonl(os, result); });

    const auto& r = result.report;
    if (r.converged)
        fmt::print(stderr, "{} n={} k={} seed={}: converged to nest {} in {} rounds\n", a.algo, a.n, a.k,
                   a.seed, r.winning_nest->value, *r.rounds_to_converge);
    else
        fmt::print(stderr, "{} n={} k={} seed={}: not converged ({}) after {} rounds{}\n", a.algo, a.n, a.k,
                   a.seed, hh::to_string(r.reason), r.rounds_executed,
                   r.detail.empty() ? "" : ": " + r.detail);
    const bool ok = r.converged && r.stable.value_or(true);
    return ok ? kOk : kCheckFailed;
}

int cmd_sweep(const SweepArgs& a) {
    hh::ExperimentSpec spec;
    spec.algorithm = algo_of(a.algo);
    spec.ns = a.ns;
    spec.ks = a.ks;
    try {
        spec.pattern = hh::QualityPattern::parse(a.qualities);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    spec.trials = a.trials;
    spec.seed = a.seed;
    spec.max_rounds = a.max_rounds;
    spec.extra_rounds = a.extra_rounds;
    spec.threads = a.threads;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto rows = hh::sweep(spec);
    emit(a.out, [&](std::ostream& os) { hh::write_summary_csv(os, rows); });
    bool errors = false;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            errors = true;
            fmt::print(stderr, "n={} k={}: {}\n", r.n, r.k, r.error);
        } else {
            fmt::print(stderr, "n={} k={}: {}/{} converged, median {:.1f} rounds\n", r.n, r.k, r.converged,
                       r.trials, r.median_rounds);
        }
    }
    return errors ? kCheckFailed : kOk;
}

std::vector<hh::lemma::Cohort> cohorts(const LemmaArgs& a) {
    std::vector<hh::lemma::Cohort> home;
    std::uint32_t nest = 1;
    for (auto s : a.sizes) home.push_back({hh::NestId{nest++}, s, true});
    for (auto s : a.passive) home.push_back({hh::NestId{nest++}, s, false});
    return home;
}

int report(const LemmaArgs& a, const hh::lemma::EstimateReport& r) {
    emit(a.out, [&](std::ostream& os) { os << hh::lemma::to_json(r).dump(2) << '\n'; });
    for (const auto& e : r.estimates) {
        if (e.relation.empty())
            fmt::print(stderr, "  {:<28} {:.6g}\n", e.name, e.value);
        else
            fmt::print(stderr, "  {:<28} {:.6g} (se {:.3g}) {} {:.6g}  {}\n", e.name, e.value,
                       e.standard_error, e.relation, e.bound, e.pass ? "ok" : "FAIL");
    }
    fmt::print(stderr, "{}: {}\n", r.check, r.pass ? "pass" : "FAIL");
    return r.pass ? kOk : kCheckFailed;
}

template <typename F>
auto checked(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

int cmd_fit(const FitArgs& a) {
    std::ifstream in(a.in);
    if (!in) throw UsageError(fmt::format("cannot read {}", a.in));
    auto rows = hh::read_summary_csv(in);
    std::erase_if(rows, [&](const hh::SummaryRow& r) {
        if (!a.algo.empty() && r.algorithm != a.algo) return true;
        if (!a.ks.empty() && std::find(a.ks.begin(), a.ks.end(), r.k) == a.ks.end()) return true;
        return false;
    });
    hh::ScalingModel model;
    hh::ScalingFit fit;
    try {
        model = hh::parse_scaling_model(a.model);
        fit = hh::fit_scaling(rows, model);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bool pass = a.min_r2 < 0 || fit.r_squared >= a.min_r2;
    nlohmann::json j;
    j["model"] = model == hh::ScalingModel::log_n ? "a*log2(n)+b" : "a*k*log2(n)+b";
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["points"] = fit.points;
    if (a.min_r2 >= 0) {
        j["min_r_squared"] = a.min_r2;
        j["pass"] = pass;
    }
    emit(a.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    fmt::print(stderr, "slope {:.4f}, intercept {:.4f}, R^2 {:.4f} over {} rows\n", fit.slope, fit.intercept,
               fit.r_squared, fit.points);
    return pass ? kOk : kCheckFailed;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"House-hunting colony simulator"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    app.add_option("--config", "Read flags from a key=value file");

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Simulate one colony and print its JSONL trace");
    run->add_option("--algo", ra.algo, "optimal or simple")->capture_default_str();
    run->add_option("--n", ra.n, "Number of ants")->required()->check(CLI::PositiveNumber);
    run->add_option("--k", ra.k, "Number of candidate nests")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--qualities", ra.qualities, "one-good, all-good, random:P or a 0/1 list")
        ->capture_default_str();
    run->add_option("--seed", ra.seed)->capture_default_str();
    run->add_option("--max-rounds", ra.max_rounds, "Round cap (0 = 200 k ceil(log2 n))")->capture_default_str();
    run->add_option("--extra-rounds", ra.extra_rounds, "Rounds to run past convergence")->capture_default_str();
    run->add_option("--out", ra.out, "Output file (default stdout)");
    run->add_flag("--verbose-trace", ra.verbose, "Include per-ant locations");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Run trials over (n, k) cells and print a CSV summary");
    sweep->add_option("--algo", sa.algo)->capture_default_str();
    sweep->add_option("--n", sa.ns, "Comma-separated ant counts")->required()->delimiter(',');
    sweep->add_option("--k", sa.ks, "Comma-separated nest counts")->delimiter(',')->capture_default_str();
    sweep->add_option("--qualities", sa.qualities, "one-good, all-good or random:P")->capture_default_str();
    sweep->add_option("--seed", sa.seed)->capture_default_str();
    sweep->add_option("--trials", sa.trials)->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--max-rounds", sa.max_rounds)->capture_default_str();
    sweep->add_option("--extra-rounds", sa.extra_rounds)->capture_default_str();
    sweep->add_option("--threads", sa.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sweep->add_option("--out", sa.out, "Output file (default stdout)");

    LemmaArgs la;
    auto* lemma = app.add_subcommand("lemma", "Estimate one of the analysis quantities");
    lemma->require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--trials", la.trials)->capture_default_str();
        sub->add_option("--seed", la.seed)->capture_default_str();
        sub->add_option("--out", la.out, "Output file (default stdout)");
    };
    auto* rs = lemma->add_subcommand("recruit-success", "Success rate of a designated active recruiter");
    rs->add_option("--sizes", la.sizes, "Active cohort sizes")->required()->delimiter(',');
    rs->add_option("--passive", la.passive, "Passive cohort sizes")->delimiter(',');
    add_common(rs);
    auto* rt = lemma->add_subcommand("retention", "Per-round ignorance retention under rumor spreading");
    rt->add_option("--n", la.n)->required()->check(CLI::PositiveNumber);
    rt->add_option("--rounds", la.rounds, "Round cap per trial (0 = 64 log2 n)")->capture_default_str();
    add_common(rt);
    auto* nd = lemma->add_subcommand("nest-delta", "Net cohort change over one recruitment round");
    nd->add_option("--sizes", la.sizes, "Active cohort sizes")->required()->delimiter(',');
    nd->add_option("--passive", la.passive, "Passive cohort sizes")->delimiter(',');
    add_common(nd);
    auto* eps = lemma->add_subcommand("eps-init", "Expected initial gap between nests 1 and 2");
    eps->add_option("--n", la.n)->required()->check(CLI::PositiveNumber);
    eps->add_option("--k", la.k)->capture_default_str();
    eps->add_option("--mode", la.mode, "exact or monte-carlo")
        ->capture_default_str()
        ->check(CLI::IsMember({"exact", "monte-carlo", "mc"}));
    add_common(eps);
    auto* rg = lemma->add_subcommand("ratio-growth", "Gap growth over one simple-algorithm recruitment round");
    rg->add_option("--n", la.n)->required()->check(CLI::PositiveNumber);
    rg->add_option("--k", la.k)->capture_default_str();
    rg->add_option("--sizes", la.sizes, "Populations of nests 1 and 2")->required()->delimiter(',')->expected(2);
    rg->add_option("--d", la.d)->capture_default_str();
    add_common(rg);
    auto* dr = lemma->add_subcommand("dropout", "Rounds until a small nest empties");
    dr->add_option("--n", la.n)->required()->check(CLI::PositiveNumber);
    dr->add_option("--k", la.k)->capture_default_str();
    dr->add_option("--small", la.small, "Initial population of nest 1")->required();
    dr->add_option("--c", la.c)->capture_default_str();
    dr->add_option("--d", la.d)->capture_default_str();
    add_common(dr);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Least-squares scaling fit of a sweep CSV");
    fit->add_option("--in", fa.in, "Sweep CSV")->required();
    fit->add_option("--model", fa.model, "log or klog")->capture_default_str();
    fit->add_option("--algo", fa.algo, "Only rows of this algorithm");
    fit->add_option("--k", fa.ks, "Only rows with these k")->delimiter(',');
    fit->add_option("--min-r2", fa.min_r2, "Fail (exit 1) below this R^2");
    fit->add_option("--out", fa.out, "Output file (default stdout)");

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(std::move(args));
        std::vector<const char*> cargs;
        for (const auto& s : args) cargs.push_back(s.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        fmt::print(stderr, "error: {}\n\n", e.what());
        const CLI::App* leaf = &app;
        while (true) {
            auto subs = leaf->get_subcommands();
            if (subs.empty()) break;
            leaf = subs.front();
        }
        std::cerr << leaf->help();
        return kUsage;
    }

    auto usage = [&](const std::string& what, const CLI::App* sub) {
        fmt::print(stderr, "error: {}\n\n", what);
        std::cerr << sub->help();
        return kUsage;
    };

    const CLI::App* active = app.get_subcommands().front();
    try {
        if (run->parsed()) return cmd_run(ra);
        if (sweep->parsed()) return cmd_sweep(sa);
        if (fit->parsed()) return cmd_fit(fa);
        active = lemma->get_subcommands().front();
        namespace L = hh::lemma;
        if (rs->parsed())
            return report(la, checked([&] { return L::recruit_success_rate({cohorts(la), la.trials, la.seed}); }));
        if (rt->parsed()) {
            std::uint32_t rounds = la.rounds;
            if (rounds == 0) {
                std::uint32_t lg = 0;
                while ((1ULL << lg) < la.n) ++lg;
                rounds = 64 * std::max<std::uint32_t>(lg, 1);
            }
            return report(la, checked([&] { return L::ignorance_retention(la.n, rounds, la.trials, la.seed); }));
        }
        if (nd->parsed())
            return report(la,
                          checked([&] { return L::nest_delta_distribution({cohorts(la), la.trials, la.seed}); }));
        if (eps->parsed()) {
            const auto mode = la.mode == "exact" ? L::GapMode::exact : L::GapMode::monte_carlo;
            return report(la,
                          checked([&] { return L::initial_gap_expectation(la.n, la.k, mode, la.trials, la.seed); }));
        }
        if (rg->parsed())
            return report(la, checked([&] {
                              return L::ratio_growth(la.n, la.k, {la.sizes[0], la.sizes[1]}, la.trials, la.seed,
                                                     {la.d});
                          }));
        if (dr->parsed())
            return report(la, checked([&] {
                              return L::dropout_time(la.n, la.k, la.small, la.trials, la.seed, {la.c, la.d});
                          }));
    } catch (const UsageError& e) {
        return usage(e.what(), active);
    }
    return usage("no command", &app);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const UsageError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}
