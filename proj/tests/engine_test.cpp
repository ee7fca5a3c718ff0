#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "hh/engine.hpp"

using namespace hh;

namespace {

ColonyConfig config(Algorithm algo, std::uint32_t n, std::vector<std::uint8_t> q, std::uint64_t seed) {
    ColonyConfig c;
    c.algorithm = algo;
    c.n = n;
    c.k = static_cast<std::uint32_t>(q.size());
    c.qualities = std::move(q);
    c.seed = seed;
    return c;
}

std::string jsonl(const RunResult& r) {
    std::ostringstream out;
    write_jsonl(out, r);
    return out.str();
}

OptimalAnt final_at(NestId nest) {
    OptimalAnt a;
    a.state = OptimalAnt::State::final;
    a.nest = nest;
    return a;
}

} // namespace

TEST(ResolveRound, SearchWithOneNest) {
    const auto cfg = config(Algorithm::simple, 5, {1}, 0);
    WorldState world(5, 1);
    Rng rng(1);
    const std::vector<ActionRequest> reqs(5, Search{});
    const auto results = resolve_round(reqs, world, cfg, rng);
    for (const auto& r : results) {
        const auto& s = std::get<SearchResult>(r);
        EXPECT_EQ(s.nest, NestId{1});
        EXPECT_EQ(s.count, 5u);
        EXPECT_EQ(s.quality, 1);
    }
    EXPECT_EQ(world.round(), 1u);
}

TEST(ResolveRound, LoneRecruiter) {
    const auto cfg = config(Algorithm::simple, 4, {1, 1}, 0);
    WorldState world(4, 2);
    world.place(0, NestId{2});
    world.place(1, NestId{1});
    world.place(2, NestId{1});
    world.place(3, NestId{2});
    Rng rng(1);
    const std::vector<ActionRequest> reqs{Recruit{true, NestId{2}}, Go{NestId{1}}, Go{NestId{1}}, Go{NestId{2}}};
    const auto results = resolve_round(reqs, world, cfg, rng);
    const auto& r = std::get<RecruitResult>(results[0]);
    EXPECT_EQ(r.nest, NestId{2});
    EXPECT_EQ(r.home_count, 1u);
    EXPECT_EQ(std::get<GoResult>(results[1]).count, 2u);
    EXPECT_EQ(std::get<GoResult>(results[3]).count, 1u);
    EXPECT_EQ(world.location(0), kHome);
}

TEST(ResolveRound, ZeroSumRecruitment) {
    const auto cfg = config(Algorithm::simple, 6, {1, 1, 1}, 0);
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        WorldState world(6, 3);
        std::vector<ActionRequest> reqs;
        for (AntId a = 0; a < 6; ++a) {
            world.place(a, NestId{a % 3 + 1});
            reqs.push_back(Recruit{true, NestId{a % 3 + 1}});
        }
        const auto results = resolve_round(reqs, world, cfg, rng);
        std::vector<int> before{0, 2, 2, 2}, after(4, 0);
        for (const auto& r : results) ++after[std::get<RecruitResult>(r).nest.value];
        int moved = 0;
        for (int i2 = 1; i2 <= 3; ++i2) moved += after[i2] - before[i2];
        ASSERT_EQ(moved, 0);
        ASSERT_EQ(std::get<RecruitResult>(results[0]).home_count, 6u);
    }
}

TEST(ResolveRound, ViolationLeavesWorldUntouched) {
    const auto cfg = config(Algorithm::simple, 2, {1, 1}, 0);
    WorldState world(2, 2);
    world.place(0, NestId{1});
    const auto before = world.locations();
    Rng rng(1);
    const std::vector<ActionRequest> reqs{Go{NestId{1}}, Go{NestId{2}}};
    EXPECT_THROW(resolve_round(reqs, world, cfg, rng), PreconditionViolation);
    EXPECT_EQ(world.locations(), before);
    EXPECT_EQ(world.round(), 0u);
    const std::vector<ActionRequest> short_reqs{Search{}};
    EXPECT_THROW(resolve_round(short_reqs, world, cfg, rng), PreconditionViolation);
}

TEST(DetectConvergence, Optimal) {
    const auto cfg = config(Algorithm::optimal, 3, {0, 1}, 0);
    const WorldState world(3, 2);
    std::vector<OptimalAnt> ants(3, final_at(NestId{2}));
    EXPECT_EQ(detect_convergence(cfg, std::span<const OptimalAnt>(ants), world), NestId{2});
    ants[1] = final_at(NestId{1});
    EXPECT_FALSE(detect_convergence(cfg, std::span<const OptimalAnt>(ants), world));
    std::vector<OptimalAnt> bad(3, final_at(NestId{1}));
    EXPECT_FALSE(detect_convergence(cfg, std::span<const OptimalAnt>(bad), world));
    ants[1] = final_at(NestId{2});
    ants[1].state = OptimalAnt::State::active;
    EXPECT_FALSE(detect_convergence(cfg, std::span<const OptimalAnt>(ants), world));
}

TEST(DetectConvergence, SimpleNeedsNoPassiveAnt) {
    const auto cfg = config(Algorithm::simple, 3, {1, 0}, 0);
    const WorldState world(3, 2);
    std::vector<SimpleAnt> ants(3, simple_ant_after_search(NestId{1}, 3, 1));
    EXPECT_EQ(detect_convergence(cfg, std::span<const SimpleAnt>(ants), world), NestId{1});
    ants[2] = simple_ant_after_search(NestId{2}, 1, 0);
    EXPECT_FALSE(detect_convergence(cfg, std::span<const SimpleAnt>(ants), world));
}

TEST(Run, OptimalSingleNest) {
    const auto r = run(config(Algorithm::optimal, 4, {1}, 11));
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.winning_nest, NestId{1});
    EXPECT_EQ(r.report.reason, StopReason::converged);
    ASSERT_FALSE(r.trace.records.empty());
    EXPECT_EQ(r.trace.records.back().round, *r.report.rounds_to_converge);
}

TEST(Run, DeterministicTrace) {
    const auto cfg = config(Algorithm::simple, 256, {0, 0, 1, 0}, 42);
    const auto a = run(cfg, {.record_trace = true, .verbose = true});
    const auto b = run(cfg, {.record_trace = true, .verbose = true});
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(jsonl(a), jsonl(b));
    auto other = cfg;
    other.seed = 43;
    EXPECT_NE(jsonl(run(other, {.record_trace = true, .verbose = true})), jsonl(a));
}

TEST(Run, RoundCapStopsRun) {
    auto cfg = config(Algorithm::simple, 256, {1, 1, 1, 1}, 1);
    cfg.max_rounds = 3;
    const auto r = run(cfg);
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.reason, StopReason::round_cap);
    EXPECT_EQ(r.report.rounds_executed, 3u);
    EXPECT_EQ(r.trace.records.size(), 3u);
}

TEST(Run, StableAfterConvergence) {
    for (auto algo : {Algorithm::optimal, Algorithm::simple}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto r = run(config(algo, 128, {1, 0, 1}, seed), {.record_trace = false, .extra_rounds = 20});
            ASSERT_TRUE(r.report.converged);
            EXPECT_EQ(r.report.stable, true);
            EXPECT_EQ(r.report.rounds_executed, *r.report.rounds_to_converge + 20);
        }
    }
}

TEST(Run, TraceRecordsCountsAndStates) {
    const auto r = run(config(Algorithm::optimal, 32, {1, 1}, 2), {.record_trace = true, .verbose = true});
    for (const auto& rec : r.trace.records) {
        std::uint32_t total = 0;
        for (auto c : rec.counts) total += c;
        ASSERT_EQ(total, 32u);
        std::uint32_t states = 0;
        for (const auto& [name, c] : rec.states) states += c;
        ASSERT_EQ(states, 32u);
        ASSERT_EQ(rec.locations.size(), 32u);
    }
}

TEST(Jsonl, Schema) {
    const auto r = run(config(Algorithm::simple, 16, {1}, 1), {.record_trace = true});
    std::istringstream in(jsonl(r));
    std::string line;
    std::size_t rounds = 0;
    nlohmann::json last;
    while (std::getline(in, line)) {
        last = nlohmann::json::parse(line);
        if (last["type"] == "round") {
            ++rounds;
            EXPECT_TRUE(last.contains("counts"));
            EXPECT_TRUE(last.contains("states"));
        }
    }
    EXPECT_EQ(rounds, r.trace.records.size());
    EXPECT_EQ(last["type"], "report");
    EXPECT_EQ(last["converged"], true);
    EXPECT_EQ(last["winning_nest"], 1);
}

TEST(TrialStreams, Reproducible) {
    auto a = derive_trial_stream(77, 0);
    auto b = derive_trial_stream(77, 0);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_NE(derive_trial_stream(77, 0).next_u64(), derive_trial_stream(77, 1).next_u64());
}

TEST(TrialStreams, FirstDrawMean) {
    double sum = 0;
    constexpr int streams = 10000;
    for (int t = 0; t < streams; ++t) sum += derive_trial_stream(5, t).unit();
    EXPECT_NEAR(sum / streams, 0.5, 0.02);
}

TEST(Rng, BelowIsInRangeAndCoversValues) {
    Rng rng(3);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++seen[v];
    }
    for (int c : seen) EXPECT_GT(c, 800);
}
