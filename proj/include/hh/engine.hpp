#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hh/colony.hpp"
#include "hh/matcher.hpp"
#include "hh/optimal.hpp"
#include "hh/rng.hpp"
#include "hh/simple.hpp"

namespace hh {

struct TraceRecord {
    std::uint32_t round = 0;
    std::vector<std::uint32_t> counts;            ///< c(0..k, round)
    std::map<std::string, std::uint32_t> states;  ///< ants per program state
    std::vector<std::uint32_t> locations;         ///< per ant; empty unless verbose

    bool operator==(const TraceRecord&) const = default;
};

struct Trace {
    std::vector<TraceRecord> records;
    bool operator==(const Trace&) const = default;
};

enum class StopReason { converged, round_cap, precondition_violation };
std::string_view to_string(StopReason reason);

struct ConvergenceReport {
    bool converged = false;
    std::optional<NestId> winning_nest;
    std::optional<std::uint32_t> rounds_to_converge;
    StopReason reason = StopReason::round_cap;
    std::uint32_t rounds_executed = 0;
    /// Set when extra rounds were run past convergence: whether the
    /// predicate kept holding with the same nest.
    std::optional<bool> stable;
    std::string detail;
};

struct RunOptions {
    bool record_trace = true;
    bool verbose = false;             ///< include per-ant locations in the trace
    std::uint32_t extra_rounds = 0;   ///< rounds to run after convergence
};

struct RunResult {
    Trace trace;
    ConvergenceReport report;
};

std::optional<NestId> detect_convergence(const ColonyConfig& config,
                                         std::span<const OptimalAnt> ants,
                                         const WorldState& world);
std::optional<NestId> detect_convergence(const ColonyConfig& config,
                                         std::span<const SimpleAnt> ants,
                                         const WorldState& world);

/// Executes one round's primitives against `world`. Randomness order:
/// search targets in ant-id order, then one matching over all recruit
/// callers. Throws PreconditionViolation for an inadmissible request;
/// the world is left untouched in that case.
std::vector<ActionResult> resolve_round(std::span<const ActionRequest> requests,
                                        WorldState& world, const ColonyConfig& config,
                                        Rng& rng);
std::vector<ActionResult> resolve_round(std::span<const ActionRequest> requests,
                                        WorldState& world, const ColonyConfig& config,
                                        Rng& rng, Matcher& matcher);

/// One colony executing synchronous rounds.
class Simulation {
public:
    explicit Simulation(ColonyConfig config);

    /// Simple-algorithm colony whose round 1 search is replaced by a fixed
    /// placement: committed[i-1] ants are located at nest i, each having
    /// observed that count. committed must have k entries summing to n.
    static Simulation from_profile(ColonyConfig config, std::span<const std::uint32_t> committed);

    /// Runs one round. Throws PreconditionViolation on a program bug.
    void advance();

    std::uint32_t round() const { return world_.round(); }
    const ColonyConfig& config() const { return config_; }
    const WorldState& world() const { return world_; }
    const std::vector<ActionRequest>& last_requests() const { return requests_; }

    std::span<const OptimalAnt> optimal_ants() const;
    std::span<const SimpleAnt> simple_ants() const;

    /// Ants per committed nest (index 0 counts uncommitted ants).
    std::vector<std::uint32_t> committed_counts() const;

    std::optional<NestId> converged_nest() const;
    TraceRecord snapshot(bool verbose) const;

private:
    void apply(std::vector<ActionRequest> requests);

    ColonyConfig config_;
    WorldState world_;
    Rng rng_;
    std::variant<std::vector<OptimalAnt>, std::vector<SimpleAnt>> ants_;
    std::vector<std::optional<ActionResult>> pending_;
    std::vector<ActionRequest> requests_;
    Matcher matcher_;
};

/// Runs rounds until convergence or the round cap. Deterministic in the
/// config (including its seed).
RunResult run(const ColonyConfig& config, const RunOptions& options = {});

nlohmann::json to_json(const TraceRecord& record);
nlohmann::json to_json(const ConvergenceReport& report);

/// One JSON object per line, each tagged "type":"round", followed by the
/// report tagged "type":"report".
void write_jsonl(std::ostream& out, const RunResult& result);

} // namespace hh
