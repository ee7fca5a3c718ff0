#pragma once

#include <cstdint>
#include <optional>

#include "hh/colony.hpp"

namespace hh {

/// Per-ant state of the O(log n) house-hunting algorithm.
///
/// The ant searches once in round 1, then runs four-round blocks (R1..R4)
/// that are aligned for the whole colony: every block begins on a round
/// r with r % 4 == 2. Ants of competing nests recruit each other in R1 and
/// compare nest populations to detect a decrease; ants of non-competing
/// nests are only exposed to recruitment in R2, when final-state ants of a
/// winning nest are the only active recruiters. A final ant recruits every
/// round.
struct OptimalAnt {
    enum class State : std::uint8_t { search, active, passive, final };

    /// Call site of the primitive issued in the current round.
    enum class Site : std::uint8_t {
        none,
        search,
        passive_go_r1,
        passive_recruit_r2,
        passive_go_r3,
        passive_go_r4,
        final_recruit,
        active_recruit_r1,
        active_go_r2,
        keep_go_r3,       // count did not decrease
        keep_recruit_r4,
        drop_recruit_r3,  // count decreased
        drop_go_r4,
        moved_go_r3,      // recruited to another nest
        moved_go_r4,
    };

    State state = State::search;
    NestId nest;
    std::uint32_t count = 0;
    std::uint8_t quality = 0;
    Site site = Site::none;

    // Values carried between rounds of one block.
    NestId nest_t;
    std::uint32_t count_t = 0;
    std::uint32_t count_n = 0;
    std::uint32_t count_h = 0;

    bool operator==(const OptimalAnt&) const = default;
};

std::string_view to_string(OptimalAnt::State s);

struct OptimalTransition {
    OptimalAnt ant;
    ActionRequest request;
};

/// Applies the result of the previously issued primitive (none before the
/// first round) and returns the updated state with the next primitive to
/// issue. Throws std::logic_error if `prev` does not match the previous
/// request kind.
OptimalTransition step(const OptimalAnt& ant, const std::optional<ActionResult>& prev);

/// The nest the ant is committed to (0 before the search).
inline NestId committed_nest(const OptimalAnt& ant) { return ant.nest; }

} // namespace hh
