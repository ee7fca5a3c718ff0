#include "hh/optimal.hpp"

#include <stdexcept>

namespace hh {

namespace {

using Site = OptimalAnt::Site;
using State = OptimalAnt::State;

template <typename T>
const T& expect(const std::optional<ActionResult>& prev) {
    if (!prev) throw std::logic_error("optimal: missing result for issued primitive");
    const T* r = std::get_if<T>(&*prev);
    if (!r) throw std::logic_error("optimal: result kind does not match issued primitive");
    return *r;
}

// Local computation following the primitive issued at ant.site. Returns
// the next call site within the block, or Site::none at the block end.
Site finish(OptimalAnt& ant, const std::optional<ActionResult>& prev) {
    switch (ant.site) {
    case Site::none:
        if (prev) throw std::logic_error("optimal: result delivered before any request");
        return Site::none;
    case Site::search: {
        const auto& r = expect<SearchResult>(prev);
        ant.nest = r.nest;
        ant.count = r.count;
        ant.quality = r.quality;
        ant.state = ant.quality == 0 ? State::passive : State::active;
        return Site::none;
    }
    case Site::passive_go_r1:
        expect<GoResult>(prev);
        return Site::passive_recruit_r2;
    case Site::passive_recruit_r2: {
        const auto& r = expect<RecruitResult>(prev);
        ant.nest_t = r.nest;
        if (ant.nest_t != ant.nest) {
            ant.nest = ant.nest_t;
            ant.state = State::final;
        }
        return Site::passive_go_r3;
    }
    case Site::passive_go_r3:
        expect<GoResult>(prev);
        return Site::passive_go_r4;
    case Site::passive_go_r4:
        expect<GoResult>(prev);
        return Site::none;
    case Site::final_recruit:
        ant.nest = expect<RecruitResult>(prev).nest;
        return Site::none;
    case Site::active_recruit_r1:
        ant.nest_t = expect<RecruitResult>(prev).nest;
        return Site::active_go_r2;
    case Site::active_go_r2:
        ant.count_t = expect<GoResult>(prev).count;
        if (ant.nest_t == ant.nest && ant.count_t >= ant.count) {
            ant.count = ant.count_t;
            return Site::keep_go_r3;
        }
        if (ant.nest_t == ant.nest) {
            ant.state = State::passive;
            return Site::drop_recruit_r3;
        }
        ant.nest = ant.nest_t;
        return Site::moved_go_r3;
    case Site::keep_go_r3:
        expect<GoResult>(prev);
        return Site::keep_recruit_r4;
    case Site::keep_recruit_r4:
        ant.count_h = expect<RecruitResult>(prev).home_count;
        if (ant.count_h == ant.count) ant.state = State::final;
        return Site::none;
    case Site::drop_recruit_r3:
        expect<RecruitResult>(prev);
        return Site::drop_go_r4;
    case Site::drop_go_r4:
        expect<GoResult>(prev);
        return Site::none;
    case Site::moved_go_r3:
        ant.count_n = expect<GoResult>(prev).count;
        if (ant.count_n < ant.count_t) ant.state = State::passive;
        ant.count = ant.count_n;
        return Site::moved_go_r4;
    case Site::moved_go_r4:
        expect<GoResult>(prev);
        return Site::none;
    }
    throw std::logic_error("optimal: corrupt call site");
}

Site block_start(State s) {
    switch (s) {
    case State::search: return Site::search;
    case State::active: return Site::active_recruit_r1;
    case State::passive: return Site::passive_go_r1;
    case State::final: return Site::final_recruit;
    }
    throw std::logic_error("optimal: corrupt state");
}

ActionRequest request_at(const OptimalAnt& ant) {
    switch (ant.site) {
    case Site::search: return Search{};
    case Site::passive_recruit_r2:
    case Site::keep_recruit_r4:
    case Site::drop_recruit_r3: return Recruit{false, ant.nest};
    case Site::final_recruit:
    case Site::active_recruit_r1: return Recruit{true, ant.nest};
    case Site::active_go_r2: return Go{ant.nest_t};
    default: return Go{ant.nest};
    }
}

} // namespace

std::string_view to_string(OptimalAnt::State s) {
    switch (s) {
    case State::search: return "search";
    case State::active: return "active";
    case State::passive: return "passive";
    case State::final: return "final";
    }
    return "?";
}

OptimalTransition step(const OptimalAnt& ant, const std::optional<ActionResult>& prev) {
    OptimalAnt next = ant;
    Site site = finish(next, prev);
    if (site == Site::none) site = block_start(next.state);
    next.site = site;
    return {next, request_at(next)};
}

} // namespace hh
