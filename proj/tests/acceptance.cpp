// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "hh/engine.hpp"
#include "hh/harness.hpp"
#include "hh/lemma.hpp"
#include "hh/matcher.hpp"

using namespace hh;
namespace L = hh::lemma;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [fail]";
        }
    }
};

std::vector<std::vector<RecruitCall>> configurations(std::uint32_t m) {
    std::vector<std::vector<RecruitCall>> out;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<RecruitCall> calls;
        for (std::uint32_t i = 0; i < m; ++i) calls.push_back({i, ((mask >> i) & 1u) != 0, NestId{i + 1}});
        out.push_back(std::move(calls));
    }
    return out;
}

Outcome matcher_oracle() {
    Outcome o;
    Matcher matcher;
    Rng rng(derive_seed(1, 1));
    constexpr std::uint64_t draws = 100000;
    double worst = 0;
    std::size_t configs = 0, outcomes = 0, outside = 0;
    for (std::uint32_t m = 1; m <= 4; ++m) {
        for (const auto& calls : configurations(m)) {
            ++configs;
            const auto dist = exact_distribution(calls);
            std::map<MatchOutcome, std::uint64_t> seen;
            for (std::uint64_t i = 0; i < draws; ++i) ++seen[matcher.run(calls, rng)];
            for (const auto& [out, c] : seen) outside += dist.count(out) == 0;
            for (const auto& [out, p] : dist) {
                ++outcomes;
                const auto it = seen.find(out);
                const double freq = it == seen.end() ? 0.0 : static_cast<double>(it->second) / draws;
                worst = std::max(worst, std::abs(freq - p.value()));
            }
        }
    }
    o.require(outside == 0, fmt::format("{} configurations, {} outcomes, {} outside support", configs, outcomes, outside));
    o.require(worst <= 0.01, fmt::format("max |freq - exact| = {:.4f} <= 0.01", worst));
    return o;
}

Outcome recruit_success() {
    Outcome o;
    const std::vector<std::pair<std::string, std::vector<L::Cohort>>> homes{
        {"{2 active}", {{NestId{1}, 2, true}}},
        {"{8 active}", {{NestId{1}, 8, true}}},
        {"{16 active, 16 passive}", {{NestId{1}, 16, true}, {NestId{2}, 16, false}}},
    };
    std::uint64_t seed = 20;
    for (const auto& [name, home] : homes) {
        const auto r = L::recruit_success_rate({home, 100000, seed++});
        const auto& e = r.at("success_rate");
        o.require(e.value >= 1.0 / 16.0, fmt::format("{} {:.4f} >= 0.0625", name, e.value));
    }
    return o;
}

Outcome ignorance() {
    Outcome o;
    for (std::uint32_t n : {16u, 256u}) {
        const auto r = L::ignorance_retention(n, 64 * static_cast<std::uint32_t>(std::log2(n)), 10000, 30 + n);
        double worst = 1;
        for (const auto& e : r.estimates)
            if (e.name.rfind("retention_round_", 0) == 0) worst = std::min(worst, e.value + 3 * e.standard_error);
        const auto& pooled = r.at("retention_pooled");
        o.require(r.pass, fmt::format("n={} pooled {:.3f}, min per-round (value+3SE) {:.3f}", n, pooled.value, worst));
    }
    std::vector<double> mins;
    std::string seq;
    for (std::uint32_t n : {64u, 256u, 1024u, 4096u}) {
        const auto r = L::ignorance_retention(n, 64 * static_cast<std::uint32_t>(std::log2(n)), 1000, 40 + n);
        mins.push_back(r.at("min_rounds_to_full").value);
        seq += fmt::format("{}{}:{}", seq.empty() ? "" : " ", n, mins.back());
    }
    o.require(mins.back() > mins.front(), fmt::format("min rounds to full {} (4096 > 64)", seq));
    return o;
}

Outcome nest_delta(bool check_negative) {
    Outcome o;
    const std::vector<std::vector<std::uint32_t>> comps{{8, 8}, {20, 10}, {30, 10, 10}};
    std::uint64_t seed = 50;
    for (const auto& comp : comps) {
        std::vector<L::Cohort> home;
        std::string name;
        for (std::uint32_t i = 0; i < comp.size(); ++i) {
            home.push_back({NestId{i + 1}, comp[i], true});
            name += fmt::format("{}{}", i ? "," : "(", comp[i]);
        }
        name += ")";
        const auto r = L::nest_delta_distribution({home, 100000, seed++});
        bool ok = true;
        std::string vals;
        for (std::uint32_t i = 1; i <= comp.size(); ++i) {
            const auto& e = check_negative ? r.at(fmt::format("nest_{}_p_negative", i))
                                           : r.at(fmt::format("nest_{}_asymmetry", i));
            ok = ok && (check_negative ? e.value >= 1.0 / 66.0 : e.pass);
            vals += fmt::format("{}{:.4f}", i > 1 ? "/" : "", e.value);
        }
        o.require(ok, fmt::format("{} {}", name, vals));
    }
    return o;
}

Outcome correctness() {
    Outcome o;
    for (auto algo : {Algorithm::optimal, Algorithm::simple}) {
        for (const char* pattern : {"one-good", "all-good"}) {
            ExperimentSpec spec;
            spec.algorithm = algo;
            spec.ns = {256};
            spec.ks = {4};
            spec.pattern = QualityPattern::parse(pattern);
            spec.trials = 500;
            spec.seed = 60;
            spec.extra_rounds = 20;
            const auto cells = sweep_cells(spec);
            std::size_t conv = 0, good = 0, stable = 0;
            for (const auto& t : cells.at(0).trials) {
                if (!t.report.converged) continue;
                ++conv;
                good += t.qualities.at(t.report.winning_nest->value - 1) == 1;
                stable += t.report.stable.value_or(false);
            }
            o.require(conv == 500 && good == 500 && stable == 500,
                      fmt::format("{} {}: {}/500 converged, {} good, {} stable", to_string(algo), pattern, conv,
                                  good, stable));
        }
    }
    return o;
}

std::vector<SummaryRow> sweep_rows(Algorithm algo, std::vector<std::uint32_t> ns, std::vector<std::uint32_t> ks,
                                   std::uint64_t seed, std::uint32_t trials = 200) {
    ExperimentSpec spec;
    spec.algorithm = algo;
    spec.ns = std::move(ns);
    spec.ks = std::move(ks);
    spec.pattern = QualityPattern::parse("all-good");
    spec.trials = trials;
    spec.seed = seed;
    return sweep(spec);
}

std::string medians(const std::vector<SummaryRow>& rows) {
    std::string s;
    for (const auto& r : rows) s += fmt::format("{}n={},k={}:{}", s.empty() ? "" : " ", r.n, r.k, r.median_rounds);
    return s;
}

Outcome optimal_scaling() {
    Outcome o;
    const auto rows = sweep_rows(Algorithm::optimal, {64, 256, 1024, 4096}, {4}, 70);
    const auto fit = fit_scaling(rows, ScalingModel::log_n);
    o.require(fit.r_squared >= 0.9, fmt::format("medians {}; a={:.2f} R^2={:.3f} >= 0.9", medians(rows), fit.slope,
                                                fit.r_squared));
    const double ratio = rows.back().median_rounds / rows.front().median_rounds;
    o.require(ratio <= 2.5, fmt::format("median ratio 4096/64 = {:.2f} <= 2.5", ratio));
    std::string conv;
    for (const auto& r : rows) conv += fmt::format("{}{}/{}", conv.empty() ? "" : " ", r.converged, r.trials);
    o.detail += fmt::format("; converged per cell {} (info)", conv);
    return o;
}

Outcome simple_scaling() {
    Outcome o;
    // The 200-trial ratio sits near the lower limit and flips with the
    // seed, so the verdict uses the same statistic at 1000 trials per cell.
    const auto small = sweep_rows(Algorithm::simple, {4096}, {2, 4}, 80);
    const auto krows = sweep_rows(Algorithm::simple, {4096}, {2, 4}, 82, 1000);
    const double ratio = krows[1].median_rounds / krows[0].median_rounds;
    o.require(ratio >= 1.3 && ratio <= 3.0,
              fmt::format("n=4096, 1000 trials/cell: medians k=2:{} k=4:{}, ratio {:.3f} in [1.3, 3.0]",
                          krows[0].median_rounds, krows[1].median_rounds, ratio));
    o.detail += fmt::format(" (200 trials/cell: {}/{} = {:.3f}, info)", small[1].median_rounds,
                            small[0].median_rounds, small[1].median_rounds / small[0].median_rounds);
    const auto rows = sweep_rows(Algorithm::simple, {1024, 4096, 16384}, {2, 4}, 81);
    for (std::uint32_t k : {2u, 4u}) {
        std::vector<SummaryRow> sub;
        for (const auto& r : rows)
            if (r.k == k) sub.push_back(r);
        const auto fit = fit_scaling(sub, ScalingModel::k_log_n);
        o.require(fit.r_squared >= 0.85,
                  fmt::format("k={} medians {}; a={:.3f} R^2={:.3f} >= 0.85", k, medians(sub), fit.slope,
                              fit.r_squared));
    }
    const auto pooled = fit_scaling(rows, ScalingModel::k_log_n);
    o.detail += fmt::format("; pooled k in {{2,4}} R^2={:.3f} (info)", pooled.r_squared);
    return o;
}

Outcome eps_bound() {
    Outcome o;
    for (std::uint32_t n : {4u, 8u, 16u}) {
        const auto r = L::initial_gap_expectation(n, 2, L::GapMode::exact, 0, 0);
        const auto& e = r.at("expected_gap");
        o.require(r.pass, fmt::format("exact n={} {:.4f} >= {:.4f}", n, e.value, e.bound));
    }
    const auto r = L::initial_gap_expectation(256, 2, L::GapMode::monte_carlo, 100000, 90);
    const auto& e = r.at("expected_gap");
    o.require(e.value >= e.bound - 3 * e.standard_error,
              fmt::format("monte-carlo n=256 {:.5f} (se {:.5f}) >= {:.5f} - 3 SE", e.value, e.standard_error,
                          e.bound));
    return o;
}

Outcome dropout() {
    Outcome o;
    const auto r = L::dropout_time(4096, 4, 16, 500, 100);
    const auto& f = r.at("fraction_within_horizon");
    o.require(f.value >= 0.99, fmt::format("{:.3f} of 500 trials empty within {} rounds (max observed {})", f.value,
                                           r.details["horizon_rounds"].dump(), r.details.value("max_rounds", -1)));
    return o;
}

Outcome determinism() {
    Outcome o;
    ColonyConfig cfg;
    cfg.algorithm = Algorithm::optimal;
    cfg.n = 512;
    cfg.k = 3;
    cfg.qualities = {1, 0, 1};
    cfg.seed = 110;
    auto jsonl = [&] {
        std::ostringstream out;
        write_jsonl(out, run(cfg, {.record_trace = true, .verbose = true, .extra_rounds = 5}));
        return out.str();
    };
    const auto a = jsonl();
    o.require(a == jsonl(), fmt::format("run JSONL identical ({} bytes)", a.size()));

    ExperimentSpec spec;
    spec.algorithm = Algorithm::simple;
    spec.ns = {128, 512};
    spec.ks = {2, 3};
    spec.pattern = QualityPattern::parse("random:0.5");
    spec.trials = 20;
    spec.seed = 111;
    auto csv = [&] {
        std::ostringstream out;
        write_summary_csv(out, sweep(spec));
        return out.str();
    };
    spec.threads = 1;
    const auto c1 = csv();
    const auto c2 = csv();
    spec.threads = 4;
    const auto c3 = csv();
    o.require(c1 == c2 && c1 == c3, fmt::format("sweep CSV identical across repeats and thread counts ({} bytes)", c1.size()));
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"matcher-oracle equivalence", matcher_oracle},
        {"recruit success >= 1/16", recruit_success},
        {"ignorance retention", ignorance},
        {"nest-delta symmetry", [] { return nest_delta(false); }},
        {"nest-delta negative >= 1/66", [] { return nest_delta(true); }},
        {"correctness n=256 k=4", correctness},
        {"optimal O(log n) scaling", optimal_scaling},
        {"simple O(k log n) scaling", simple_scaling},
        {"initial gap >= 1/(3(n-1))", eps_bound},
        {"small nest dropout", dropout},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = fmt::format("exception: {}", e.what());
        }
        const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
        failed += !o.pass;
        fmt::print("{} {:>2} {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail,
                   secs.count());
        std::fflush(stdout);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
