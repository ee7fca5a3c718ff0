#include "hh/simple.hpp"

#include <stdexcept>

namespace hh {

namespace {

template <typename T>
const T& expect(const std::optional<ActionResult>& prev) {
    if (!prev) throw std::logic_error("simple: missing result for issued primitive");
    const T* r = std::get_if<T>(&*prev);
    if (!r) throw std::logic_error("simple: result kind does not match issued primitive");
    return *r;
}

} // namespace

std::string_view to_string(SimpleAnt::State s) {
    return s == SimpleAnt::State::active ? "active" : "passive";
}

bool recruit_decision(std::uint32_t count, std::uint32_t n, Rng& rng) {
    if (n == 0 || count > n) throw std::invalid_argument("recruit_decision: need 0 <= count <= n, n > 0");
    if (count == 0) return false;
    if (count == n) return true;
    return rng.chance(count, n);
}

SimpleAnt simple_ant_after_search(NestId nest, std::uint32_t count, std::uint8_t quality) {
    SimpleAnt ant;
    ant.state = quality == 0 ? SimpleAnt::State::passive : SimpleAnt::State::active;
    ant.nest = nest;
    ant.count = count;
    ant.phase = SimpleAnt::Phase::search;
    ant.started = true;
    return ant;
}

SimpleTransition step(const SimpleAnt& ant, const std::optional<ActionResult>& prev,
                      std::uint32_t n, Rng& rng) {
    using State = SimpleAnt::State;
    using Phase = SimpleAnt::Phase;
    SimpleAnt next = ant;

    if (!ant.started) {
        if (prev) throw std::logic_error("simple: result delivered before any request");
        next.started = true;
        next.phase = Phase::search;
        return {next, Search{}};
    }

    switch (ant.phase) {
    case Phase::search: {
        // A prepared ant (simple_ant_after_search) has no pending result.
        if (prev) {
            const auto& r = expect<SearchResult>(prev);
            next.nest = r.nest;
            next.count = r.count;
            next.state = r.quality == 0 ? State::passive : State::active;
        }
        break;
    }
    case Phase::recruit: {
        const auto& r = expect<RecruitResult>(prev);
        if (r.nest != next.nest) {
            next.nest = r.nest;
            next.state = State::active;
        }
        break;
    }
    case Phase::assess: {
        const auto& r = expect<GoResult>(prev);
        if (next.state == State::active) next.count = r.count;
        break;
    }
    }

    if (ant.phase == Phase::recruit) {
        next.phase = Phase::assess;
        return {next, Go{next.nest}};
    }
    next.phase = Phase::recruit;
    const bool active = next.state == State::active && recruit_decision(next.count, n, rng);
    return {next, Recruit{active, next.nest}};
}

} // namespace hh
