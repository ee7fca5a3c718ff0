#pragma once

#include <cstdint>
#include <optional>

#include "hh/colony.hpp"
#include "hh/rng.hpp"

namespace hh {

/// Per-ant state of the O(k log n) population-proportional algorithm.
///
/// Round 1 is a search. Afterwards even rounds are recruitment rounds at
/// the home nest and odd rounds are assessment rounds at the committed
/// nest. An active ant recruits with probability count/n, where count is
/// the population it last assessed. A passive ant (committed to a bad
/// nest) waits at home on recruitment rounds and sits at its nest on
/// assessment rounds until somebody recruits it.
struct SimpleAnt {
    enum class State : std::uint8_t { active, passive };
    enum class Phase : std::uint8_t { search, recruit, assess };

    State state = State::active;
    NestId nest;
    std::uint32_t count = 0;
    Phase phase = Phase::search; ///< phase of the primitive issued last
    bool started = false;

    bool operator==(const SimpleAnt&) const = default;
};

std::string_view to_string(SimpleAnt::State s);

struct SimpleTransition {
    SimpleAnt ant;
    ActionRequest request;
};

/// 1 with probability exactly count/n. Throws std::invalid_argument if
/// count > n or n == 0.
bool recruit_decision(std::uint32_t count, std::uint32_t n, Rng& rng);

/// Applies the previous result and returns the next primitive. The
/// recruitment coin is drawn from `rng` only for active ants entering a
/// recruitment round.
SimpleTransition step(const SimpleAnt& ant, const std::optional<ActionResult>& prev,
                      std::uint32_t n, Rng& rng);

/// Ant state as it is right after a search that found `nest` holding
/// `count` ants; used to start the dynamics from a prepared population
/// profile.
SimpleAnt simple_ant_after_search(NestId nest, std::uint32_t count, std::uint8_t quality);

} // namespace hh
