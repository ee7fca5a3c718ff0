#include "hh/engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hh {

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::round_cap: return "round_cap";
    case StopReason::precondition_violation: return "precondition_violation";
    }
    return "?";
}

std::optional<NestId> detect_convergence(const ColonyConfig& config,
                                         std::span<const OptimalAnt> ants, const WorldState&) {
    if (ants.empty()) return std::nullopt;
    const NestId nest = ants.front().nest;
    if (nest.is_home()) return std::nullopt;
    for (const auto& ant : ants)
        if (ant.state != OptimalAnt::State::final || ant.nest != nest) return std::nullopt;
    if (quality(config, nest) != 1) return std::nullopt;
    return nest;
}

std::optional<NestId> detect_convergence(const ColonyConfig& config,
                                         std::span<const SimpleAnt> ants, const WorldState&) {
    if (ants.empty()) return std::nullopt;
    const NestId nest = ants.front().nest;
    if (nest.is_home()) return std::nullopt;
    for (const auto& ant : ants)
        if (!ant.started || ant.state != SimpleAnt::State::active || ant.nest != nest)
            return std::nullopt;
    if (quality(config, nest) != 1) return std::nullopt;
    return nest;
}

std::vector<ActionResult> resolve_round(std::span<const ActionRequest> requests,
                                        WorldState& world, const ColonyConfig& config,
                                        Rng& rng) {
    Matcher matcher;
    return resolve_round(requests, world, config, rng, matcher);
}

std::vector<ActionResult> resolve_round(std::span<const ActionRequest> requests,
                                        WorldState& world, const ColonyConfig& config,
                                        Rng& rng, Matcher& matcher) {
    const std::uint32_t n = world.n();
    if (requests.size() != n)
        throw PreconditionViolation(
            fmt::format("expected one request per ant ({}), got {}", n, requests.size()));
    for (AntId a = 0; a < n; ++a)
        if (auto why = validate_request(world, a, requests[a])) throw PreconditionViolation(*why);

    std::vector<NestId> searched(n);
    std::vector<RecruitCall> calls;
    for (AntId a = 0; a < n; ++a) {
        const auto& req = requests[a];
        if (std::holds_alternative<Search>(req)) {
            searched[a] = NestId{static_cast<std::uint32_t>(1 + rng.below(config.k))};
            world.place(a, searched[a]);
        } else if (const auto* go = std::get_if<Go>(&req)) {
            world.place(a, go->target);
        } else {
            const auto& rec = std::get<Recruit>(req);
            calls.push_back({a, rec.active, rec.target});
            world.place(a, kHome);
        }
    }

    std::vector<NestId> returned(n);
    if (!calls.empty()) {
        const auto& outcome = matcher.run(calls, rng);
        for (std::size_t i = 0; i < calls.size(); ++i) {
            returned[calls[i].ant] = outcome.returned[i];
            // The recruited ant is led to the nest, so it may revisit it later.
            world.learn(calls[i].ant, outcome.returned[i]);
        }
    }

    const auto c = counts(world);
    std::vector<ActionResult> results;
    results.reserve(n);
    for (AntId a = 0; a < n; ++a) {
        const auto& req = requests[a];
        if (std::holds_alternative<Search>(req)) {
            results.emplace_back(SearchResult{searched[a], quality(config, searched[a]),
                                              c[searched[a].value]});
        } else if (const auto* go = std::get_if<Go>(&req)) {
            results.emplace_back(GoResult{c[go->target.value]});
        } else {
            results.emplace_back(RecruitResult{returned[a], c[0]});
        }
    }
    world.set_round(world.round() + 1);
    return results;
}

Simulation::Simulation(ColonyConfig config)
    : config_(std::move(config)), world_(config_.n, config_.k), rng_(config_.seed) {
    config_.validate();
    if (config_.algorithm == Algorithm::optimal)
        ants_ = std::vector<OptimalAnt>(config_.n);
    else
        ants_ = std::vector<SimpleAnt>(config_.n);
    pending_.assign(config_.n, std::nullopt);
}

Simulation Simulation::from_profile(ColonyConfig config, std::span<const std::uint32_t> committed) {
    if (config.algorithm != Algorithm::simple)
        throw std::invalid_argument("from_profile: only the simple algorithm supports profiles");
    if (committed.size() != config.k)
        throw std::invalid_argument("from_profile: need one population per candidate nest");
    if (std::accumulate(committed.begin(), committed.end(), std::uint64_t{0}) != config.n)
        throw std::invalid_argument("from_profile: populations must sum to n");

    Simulation sim(std::move(config));
    auto& ants = std::get<std::vector<SimpleAnt>>(sim.ants_);
    AntId a = 0;
    for (std::uint32_t i = 0; i < committed.size(); ++i) {
        const NestId nest{i + 1};
        for (std::uint32_t j = 0; j < committed[i]; ++j, ++a) {
            ants[a] = simple_ant_after_search(nest, committed[i], quality(sim.config_, nest));
            sim.world_.place(a, nest);
        }
    }
    sim.requests_.assign(sim.config_.n, Search{});
    sim.world_.set_round(1);
    return sim;
}

void Simulation::advance() {
    std::vector<ActionRequest> requests;
    requests.reserve(config_.n);
    std::visit(
        [&](auto& ants) {
            for (std::size_t a = 0; a < ants.size(); ++a) {
                if constexpr (std::is_same_v<std::decay_t<decltype(ants)>, std::vector<OptimalAnt>>) {
                    auto t = step(ants[a], pending_[a]);
                    ants[a] = t.ant;
                    requests.push_back(t.request);
                } else {
                    auto t = step(ants[a], pending_[a], config_.n, rng_);
                    ants[a] = t.ant;
                    requests.push_back(t.request);
                }
            }
        },
        ants_);
    apply(std::move(requests));
}

void Simulation::apply(std::vector<ActionRequest> requests) {
    auto results = resolve_round(requests, world_, config_, rng_, matcher_);
    for (std::size_t a = 0; a < results.size(); ++a) pending_[a] = std::move(results[a]);
    requests_ = std::move(requests);
}

std::span<const OptimalAnt> Simulation::optimal_ants() const {
    if (const auto* v = std::get_if<std::vector<OptimalAnt>>(&ants_)) return *v;
    return {};
}

std::span<const SimpleAnt> Simulation::simple_ants() const {
    if (const auto* v = std::get_if<std::vector<SimpleAnt>>(&ants_)) return *v;
    return {};
}

std::vector<std::uint32_t> Simulation::committed_counts() const {
    std::vector<std::uint32_t> c(config_.k + 1, 0);
    std::visit([&](const auto& ants) {
        for (const auto& ant : ants) ++c[ant.nest.value];
    }, ants_);
    return c;
}

std::optional<NestId> Simulation::converged_nest() const {
    return std::visit(
        [&](const auto& ants) {
            using Ant = typename std::decay_t<decltype(ants)>::value_type;
            return detect_convergence(config_, std::span<const Ant>(ants), world_);
        },
        ants_);
}

TraceRecord Simulation::snapshot(bool verbose) const {
    TraceRecord rec;
    rec.round = world_.round();
    rec.counts = counts(world_);
    std::visit([&](const auto& ants) {
        using Ant = typename std::decay_t<decltype(ants)>::value_type;
        if constexpr (std::is_same_v<Ant, OptimalAnt>) {
            for (auto s : {OptimalAnt::State::search, OptimalAnt::State::active,
                           OptimalAnt::State::passive, OptimalAnt::State::final})
                rec.states[std::string(to_string(s))] = 0;
        } else {
            for (auto s : {SimpleAnt::State::active, SimpleAnt::State::passive})
                rec.states[std::string(to_string(s))] = 0;
        }
        for (const auto& ant : ants) ++rec.states[std::string(to_string(ant.state))];
    }, ants_);
    if (verbose) {
        rec.locations.reserve(config_.n);
        for (const auto& loc : world_.locations()) rec.locations.push_back(loc.value);
    }
    return rec;
}

RunResult run(const ColonyConfig& config, const RunOptions& options) {
    RunResult result;
    auto& report = result.report;
    const std::uint32_t cap = config.round_cap();
    Simulation sim(config);
    try {
        while (sim.round() < cap) {
            sim.advance();
            if (options.record_trace) result.trace.records.push_back(sim.snapshot(options.verbose));
            if (auto nest = sim.converged_nest()) {
                report.converged = true;
                report.winning_nest = *nest;
                report.rounds_to_converge = sim.round();
                report.reason = StopReason::converged;
                break;
            }
        }
        if (report.converged && options.extra_rounds > 0) {
            bool stable = true;
            for (std::uint32_t i = 0; i < options.extra_rounds; ++i) {
                sim.advance();
                if (options.record_trace)
                    result.trace.records.push_back(sim.snapshot(options.verbose));
                if (sim.converged_nest() != report.winning_nest) stable = false;
            }
            report.stable = stable;
        }
        report.rounds_executed = sim.round();
    } catch (const PreconditionViolation& e) {
        report.converged = false;
        report.winning_nest.reset();
        report.rounds_to_converge.reset();
        report.reason = StopReason::precondition_violation;
        report.detail = e.what();
        report.rounds_executed = sim.round();
    }
    return result;
}

nlohmann::json to_json(const TraceRecord& record) {
    nlohmann::json j;
    j["type"] = "round";
    j["round"] = record.round;
    j["counts"] = record.counts;
    j["states"] = record.states;
    if (!record.locations.empty()) j["locations"] = record.locations;
    return j;
}

nlohmann::json to_json(const ConvergenceReport& report) {
    nlohmann::json j;
    j["type"] = "report";
    j["converged"] = report.converged;
    j["winning_nest"] = report.winning_nest ? nlohmann::json(report.winning_nest->value) : nlohmann::json();
    j["rounds_to_converge"] =
        report.rounds_to_converge ? nlohmann::json(*report.rounds_to_converge) : nlohmann::json();
    j["reason"] = to_string(report.reason);
    j["rounds_executed"] = report.rounds_executed;
    if (report.stable) j["stable"] = *report.stable;
    if (!report.detail.empty()) j["detail"] = report.detail;
    return j;
}

void write_jsonl(std::ostream& out, const RunResult& result) {
    for (const auto& rec : result.trace.records) out << to_json(rec).dump() << '\n';
    out << to_json(result.report).dump() << '\n';
}

} // namespace hh
