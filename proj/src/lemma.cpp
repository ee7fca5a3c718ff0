#include "hh/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "hh/engine.hpp"
#include "hh/matcher.hpp"
#include "hh/rng.hpp"

namespace hh::lemma {

namespace {

struct Layout {
    std::vector<RecruitCall> calls;
    std::vector<std::pair<std::size_t, std::size_t>> ranges; // [begin, end) per cohort
};

Layout layout(const ScenarioSpec& spec) {
    Layout out;
    AntId next = 0;
    for (const auto& cohort : spec.home) {
        if (cohort.nest.is_home())
            throw std::invalid_argument("scenario: cohorts must be committed to a candidate nest");
        const std::size_t begin = out.calls.size();
        for (std::uint32_t i = 0; i < cohort.count; ++i)
            out.calls.push_back({next++, cohort.active, cohort.nest});
        out.ranges.emplace_back(begin, out.calls.size());
    }
    return out;
}

double gap(double hi, double lo) {
    if (hi < lo) std::swap(hi, lo);
    return hi / lo - 1.0;
}

void finish(EstimateReport& report) {
    report.pass = std::all_of(report.estimates.begin(), report.estimates.end(),
                              [](const Estimate& e) { return e.pass; });
}

} // namespace

const Estimate& EstimateReport::at(std::string_view name) const {
    for (const auto& e : estimates)
        if (e.name == name) return e;
    throw std::out_of_range(fmt::format("report '{}' has no estimate '{}'", check, name));
}

Estimate at_least(std::string name, double value, double se, double bound, double margin) {
    return {std::move(name), value, se, ">=", bound, margin, value >= bound - margin * se};
}

Estimate at_most(std::string name, double value, double se, double bound, double margin) {
    return {std::move(name), value, se, "<=", bound, margin, value <= bound + margin * se};
}

Estimate info(std::string name, double value, double se) {
    return {std::move(name), value, se, "", 0.0, 0.0, true};
}

nlohmann::json to_json(const EstimateReport& report) {
    nlohmann::json j;
    j["check"] = report.check;
    j["trials"] = report.trials;
    j["pass"] = report.pass;
    auto& list = j["estimates"] = nlohmann::json::array();
    for (const auto& e : report.estimates) {
        nlohmann::json item{{"name", e.name}, {"value", e.value}, {"standard_error", e.standard_error}};
        if (!e.relation.empty()) {
            item["relation"] = e.relation;
            item["bound"] = e.bound;
            item["margin_se"] = e.margin;
            item["pass"] = e.pass;
        }
        list.push_back(std::move(item));
    }
    j["details"] = report.details;
    return j;
}

EstimateReport recruit_success_rate(const ScenarioSpec& spec) {
    const auto lay = layout(spec);
    if (lay.calls.size() < 2)
        throw std::invalid_argument("recruit_success_rate: needs at least two ants at home");
    const auto designated = std::find_if(lay.calls.begin(), lay.calls.end(),
                                         [](const RecruitCall& c) { return c.active; });
    if (designated == lay.calls.end())
        throw std::invalid_argument("recruit_success_rate: no active ant to designate");
    const auto index = static_cast<std::size_t>(designated - lay.calls.begin());

    Matcher matcher;
    Moments success;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
        auto rng = derive_trial_stream(spec.seed, t);
        success.add(matcher.run(lay.calls, rng).indicator[index] == 1 ? 1.0 : 0.0);
    }

    EstimateReport report;
    report.check = "recruit-success";
    report.trials = spec.trials;
    report.estimates.push_back(
        at_least("success_rate", success.mean(), success.standard_error(), 1.0 / 16.0, 3.0));
    report.details["home_population"] = lay.calls.size();
    report.details["designated_ant"] = designated->ant;
    finish(report);
    return report;
}

EstimateReport ignorance_retention(std::uint32_t n, std::uint32_t rounds, std::uint64_t trials,
                                   std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("ignorance_retention: n must be positive");
    constexpr NestId kWinner{1};
    constexpr NestId kOther{2};
    constexpr double kBound = 0.25;

    std::vector<Moments> per_round(rounds);
    Moments pooled;
    std::vector<std::uint32_t> full_at; // rounds to full information, completed trials only
    std::uint64_t censored = 0;

    Matcher matcher;
    std::vector<RecruitCall> calls(n);
    std::vector<std::uint8_t> informed(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto rng = derive_trial_stream(seed, t);
        std::fill(informed.begin(), informed.end(), 0);
        informed[0] = 1;
        std::uint32_t informed_count = 1;
        std::uint32_t r = 0;
        while (informed_count < n && r < rounds) {
            for (AntId a = 0; a < n; ++a)
                calls[a] = {a, informed[a] != 0, informed[a] ? kWinner : kOther};
            const auto& outcome = matcher.run(calls, rng);
            std::uint32_t stayed = 0, ignorant = 0;
            for (AntId a = 0; a < n; ++a) {
                if (informed[a]) continue;
                ++ignorant;
                const bool learns = outcome.returned[a] == kWinner;
                per_round[r].add(learns ? 0.0 : 1.0);
                pooled.add(learns ? 0.0 : 1.0);
                if (learns) informed[a] = 2; // applied after the scan
                else ++stayed;
            }
            for (auto& f : informed)
                if (f == 2) f = 1;
            informed_count += ignorant - stayed;
            ++r;
        }
        if (informed_count == n) full_at.push_back(r);
        else ++censored;
    }

    EstimateReport report;
    report.check = "retention";
    report.trials = trials;
    report.estimates.push_back(
        at_least("retention_pooled", pooled.mean(), pooled.standard_error(), kBound, 3.0));
    auto& rows = report.details["per_round"] = nlohmann::json::array();
    for (std::uint32_t r = 0; r < rounds; ++r) {
        const auto& m = per_round[r];
        if (m.count() == 0) continue;
        // With few samples the plug-in SE can vanish; never test with less
        // spread than a Bernoulli(1/4) would have.
        const double null_se = std::sqrt(kBound * (1.0 - kBound) / static_cast<double>(m.count()));
        const double se = std::max(m.standard_error(), null_se);
        auto e = at_least(fmt::format("retention_round_{}", r + 1), m.mean(), se, kBound, 3.0);
        rows.push_back({{"round", r + 1}, {"samples", m.count()}, {"retention", m.mean()},
                        {"standard_error", m.standard_error()}, {"pass", e.pass}});
        report.estimates.push_back(std::move(e));
    }

    auto& full = report.details["rounds_to_full"];
    full["completed"] = full_at.size();
    full["censored"] = censored;
    if (!full_at.empty()) {
        std::sort(full_at.begin(), full_at.end());
        const double mean = std::accumulate(full_at.begin(), full_at.end(), 0.0) /
                            static_cast<double>(full_at.size());
        full["min"] = full_at.front();
        full["median"] = full_at[full_at.size() / 2];
        full["max"] = full_at.back();
        full["mean"] = mean;
        report.estimates.push_back(info("min_rounds_to_full", full_at.front()));
        report.estimates.push_back(info("mean_rounds_to_full", mean));
    }
    finish(report);
    return report;
}

EstimateReport nest_delta_distribution(const ScenarioSpec& spec) {
    const auto lay = layout(spec);
    if (lay.calls.empty()) throw std::invalid_argument("nest_delta_distribution: empty scenario");
    for (const auto& cohort : spec.home)
        if (!cohort.active)
            throw std::invalid_argument("nest_delta_distribution: all home ants must be active");
    {
        std::vector<NestId> nests;
        for (const auto& c : spec.home) nests.push_back(c.nest);
        std::sort(nests.begin(), nests.end());
        if (std::adjacent_find(nests.begin(), nests.end()) != nests.end())
            throw std::invalid_argument("nest_delta_distribution: cohorts must use distinct nests");
    }

    const std::size_t cohorts = spec.home.size();
    std::vector<Moments> neg(cohorts), pos(cohorts), zero(cohorts), diff(cohorts);
    Matcher matcher;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
        auto rng = derive_trial_stream(spec.seed, t);
        const auto& outcome = matcher.run(lay.calls, rng);
        for (std::size_t c = 0; c < cohorts; ++c) {
            int y = 0;
            for (auto i = lay.ranges[c].first; i < lay.ranges[c].second; ++i) y += outcome.indicator[i];
            neg[c].add(y < 0);
            pos[c].add(y > 0);
            zero[c].add(y == 0);
            diff[c].add((y < 0) - (y > 0));
        }
    }

    EstimateReport report;
    report.check = "nest-delta";
    report.trials = spec.trials;
    auto& rows = report.details["cohorts"] = nlohmann::json::array();
    for (std::size_t c = 0; c < cohorts; ++c) {
        const auto nest = spec.home[c].nest.value;
        const bool strict_subset = spec.home[c].count < lay.calls.size();
        rows.push_back({{"nest", nest},
                        {"size", spec.home[c].count},
                        {"p_negative", neg[c].mean()},
                        {"p_zero", zero[c].mean()},
                        {"p_positive", pos[c].mean()},
                        {"strict_subset", strict_subset}});
        report.estimates.push_back(at_most(fmt::format("nest_{}_asymmetry", nest),
                                           std::abs(diff[c].mean()), diff[c].standard_error(),
                                           0.0, 4.0));
        if (strict_subset)
            report.estimates.push_back(at_least(fmt::format("nest_{}_p_negative", nest), neg[c].mean(),
                                                neg[c].standard_error(), 1.0 / 66.0, 3.0));
        else
            report.estimates.push_back(
                info(fmt::format("nest_{}_p_negative", nest), neg[c].mean(), neg[c].standard_error()));
    }
    finish(report);
    return report;
}

EstimateReport initial_gap_expectation(std::uint32_t n, std::uint32_t k, GapMode mode,
                                       std::uint64_t trials, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("initial_gap_expectation: n must be at least 2");
    if (k < 2) throw std::invalid_argument("initial_gap_expectation: k must be at least 2");
    const double bound = 1.0 / (3.0 * (n - 1));

    EstimateReport report;
    report.check = "eps-init";
    report.details["n"] = n;
    report.details["k"] = k;
    report.details["mode"] = mode == GapMode::exact ? "exact" : "monte-carlo";

    if (mode == GapMode::exact) {
        if (k != 2 || n > 30)
            throw std::invalid_argument("initial_gap_expectation: exact mode needs k=2 and n<=30");
        // X ~ Binomial(n, 1/2) ants at nest 1, n - X at nest 2.
        long double unconditioned = 0, both_nonempty = 0;
        long double binom = 1; // C(n, x)
        const long double scale = std::ldexp(1.0L, -static_cast<int>(n));
        for (std::uint32_t x = 0; x <= n; ++x) {
            if (x > 0) binom = binom * (n - x + 1) / x;
            const long double p = binom * scale;
            if (x == 0 || x == n) continue;
            both_nonempty += p;
            unconditioned += p * gap(x, n - x);
        }
        report.trials = 0;
        report.estimates.push_back(at_least("expected_gap", static_cast<double>(unconditioned), 0.0, bound, 0.0));
        report.estimates.push_back(info("expected_gap_given_nonempty",
                                        static_cast<double>(unconditioned / both_nonempty)));
        report.estimates.push_back(info("excluded_mass", static_cast<double>(1 - both_nonempty)));
    } else {
        Moments unconditioned, conditioned;
        std::uint64_t excluded = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            auto rng = derive_trial_stream(seed, t);
            std::uint32_t first = 0, second = 0;
            for (std::uint32_t a = 0; a < n; ++a) {
                const auto nest = rng.below(k);
                first += nest == 0;
                second += nest == 1;
            }
            if (first == 0 || second == 0) {
                ++excluded;
                unconditioned.add(0.0);
                continue;
            }
            const double e = gap(first, second);
            unconditioned.add(e);
            conditioned.add(e);
        }
        report.trials = trials;
        report.estimates.push_back(at_least("expected_gap", unconditioned.mean(),
                                            unconditioned.standard_error(), bound, 3.0));
        report.estimates.push_back(info("expected_gap_given_nonempty", conditioned.mean(),
                                        conditioned.standard_error()));
        report.estimates.push_back(
            info("excluded_mass", trials ? static_cast<double>(excluded) / trials : 0.0));
    }
    report.details["bound"] = bound;
    finish(report);
    return report;
}

namespace {

// Populations for nests 1..k with nest 1 and 2 fixed and the remaining
// ants spread as evenly as possible over `from`..k.
std::vector<std::uint32_t> spread(std::uint32_t n, std::uint32_t k,
                                  const std::vector<std::uint32_t>& fixed) {
    std::vector<std::uint32_t> pops(k, 0);
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        pops[i] = fixed[i];
        used += fixed[i];
    }
    if (used > n) throw std::invalid_argument("population profile exceeds n");
    const auto free_nests = static_cast<std::uint32_t>(k - fixed.size());
    auto rest = static_cast<std::uint32_t>(n - used);
    if (free_nests == 0) {
        if (rest != 0) throw std::invalid_argument("population profile must account for all n ants");
        return pops;
    }
    for (std::uint32_t i = 0; i < free_nests; ++i)
        pops[fixed.size() + i] = rest / free_nests + (i < rest % free_nests ? 1 : 0);
    return pops;
}

ColonyConfig all_good(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
    ColonyConfig config;
    config.n = n;
    config.k = k;
    config.qualities.assign(k, 1);
    config.algorithm = Algorithm::simple;
    config.seed = seed;
    return config;
}

} // namespace

EstimateReport ratio_growth(std::uint32_t n, std::uint32_t k,
                            std::pair<std::uint32_t, std::uint32_t> sizes, std::uint64_t trials,
                            std::uint64_t seed, GrowthParams params) {
    if (k < 2) throw std::invalid_argument("ratio_growth: k must be at least 2");
    const double threshold = n / (params.d * k);
    if (sizes.first < threshold || sizes.second < threshold)
        throw std::invalid_argument(fmt::format(
            "ratio_growth: both sizes must be at least n/(dk) = {:.3f}", threshold));
    const auto pops = spread(n, k, {sizes.first, sizes.second});

    const double before = gap(sizes.first, sizes.second);
    Moments after;
    std::uint64_t excluded = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto sim = Simulation::from_profile(all_good(n, k, derive_seed(seed, t)), pops);
        sim.advance(); // recruitment
        sim.advance(); // assessment
        const auto c = counts(sim.world());
        if (c[1] == 0 || c[2] == 0) {
            ++excluded;
            continue;
        }
        after.add(gap(c[1], c[2]));
    }

    const double factor = 1.0 + 1.0 / (2.0 * params.d * k);
    EstimateReport report;
    report.check = "ratio-growth";
    report.trials = trials;
    report.estimates.push_back(info("gap_before", before));
    report.estimates.push_back(
        at_least("gap_after", after.mean(), after.standard_error(), factor * before, 3.0));
    report.estimates.push_back(info("excluded_mass", trials ? static_cast<double>(excluded) / trials : 0.0));
    report.details["growth_factor_required"] = factor;
    report.details["growth_factor_observed"] = before > 0 ? after.mean() / before : 0.0;
    report.details["populations"] = pops;
    report.details["d"] = params.d;
    finish(report);
    return report;
}

EstimateReport dropout_time(std::uint32_t n, std::uint32_t k, std::uint32_t small,
                            std::uint64_t trials, std::uint64_t seed, DropoutParams params) {
    if (k < 2) throw std::invalid_argument("dropout_time: k must be at least 2");
    const double threshold = n / (params.d * k);
    if (small > threshold)
        throw std::invalid_argument(
            fmt::format("dropout_time: small nest must hold at most n/(dk) = {:.3f} ants", threshold));
    const auto pops = spread(n, k, {small});
    const double horizon = params.d * (params.c + 4.0) * k * std::log(static_cast<double>(n));
    const auto cap = static_cast<std::uint32_t>(std::ceil(horizon));

    std::vector<std::uint32_t> dropout;
    std::uint64_t within = 0;
    Moments first_delta;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::uint32_t elapsed = 0;
        if (small > 0) {
            auto sim = Simulation::from_profile(all_good(n, k, derive_seed(seed, t)), pops);
            while (elapsed < cap) {
                sim.advance();
                ++elapsed;
                const auto committed = sim.committed_counts()[1];
                if (elapsed == 2) first_delta.add(static_cast<double>(committed) - small);
                if (committed == 0) break;
            }
            if (sim.committed_counts()[1] != 0) elapsed = cap + 1;
        }
        dropout.push_back(elapsed);
        if (elapsed <= cap) ++within;
    }

    EstimateReport report;
    report.check = "dropout";
    report.trials = trials;
    const double frac = trials ? static_cast<double>(within) / trials : 1.0;
    report.estimates.push_back(at_least("fraction_within_horizon", frac, 0.0, 0.99, 0.0));
    if (first_delta.count() > 0)
        report.estimates.push_back(at_most("mean_delta_first_round", first_delta.mean(),
                                           first_delta.standard_error(), 0.0, 3.0));
    std::sort(dropout.begin(), dropout.end());
    if (!dropout.empty()) {
        report.details["min_rounds"] = dropout.front();
        report.details["median_rounds"] = dropout[dropout.size() / 2];
        report.details["max_rounds"] = dropout.back();
    }
    report.details["horizon_rounds"] = cap;
    report.details["populations"] = pops;
    report.details["c"] = params.c;
    report.details["d"] = params.d;
    finish(report);
    return report;
}

} // namespace hh::lemma
