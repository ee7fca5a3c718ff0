#include "hh/matcher.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace hh {

namespace {

void check_unique(std::span<const RecruitCall> calls) {
    if (calls.empty()) throw std::invalid_argument("match_round: empty call set");
    std::vector<AntId> ants;
    ants.reserve(calls.size());
    for (const auto& c : calls) ants.push_back(c.ant);
    std::sort(ants.begin(), ants.end());
    if (std::adjacent_find(ants.begin(), ants.end()) != ants.end())
        throw std::invalid_argument("match_round: ant appears twice in call set");
}

} // namespace

const MatchOutcome& Matcher::run(std::span<const RecruitCall> calls, Rng& rng) {
    const auto m = static_cast<std::uint32_t>(calls.size());
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), 0u);
    for (std::uint32_t i = m; i > 1; --i) {
        const auto j = static_cast<std::uint32_t>(rng.below(i));
        std::swap(order_[i - 1], order_[j]);
    }

    recruited_by_.assign(m, -1);
    recruited_someone_.assign(m, 0);
    outcome_.pairs.clear();
    for (const auto a : order_) {
        if (!calls[a].active || recruited_by_[a] >= 0) continue;
        const auto b = static_cast<std::uint32_t>(rng.below(m));
        if (recruited_someone_[b] || recruited_by_[b] >= 0) continue;
        recruited_someone_[a] = 1;
        recruited_by_[b] = static_cast<std::int32_t>(a);
        outcome_.pairs.emplace_back(calls[a].ant, calls[b].ant);
    }
    std::sort(outcome_.pairs.begin(), outcome_.pairs.end());

    outcome_.returned.resize(m);
    outcome_.indicator.resize(m);
    for (std::uint32_t a = 0; a < m; ++a) {
        const auto by = recruited_by_[a];
        outcome_.returned[a] = by >= 0 ? calls[static_cast<std::size_t>(by)].target : calls[a].target;
        std::int8_t x = 0;
        if (by >= 0 && by != static_cast<std::int32_t>(a)) x = -1;
        else if (recruited_someone_[a] && by != static_cast<std::int32_t>(a)) x = 1;
        outcome_.indicator[a] = x;
    }
    return outcome_;
}

MatchOutcome match_round(std::span<const RecruitCall> calls, Rng& rng) {
    check_unique(calls);
    Matcher matcher;
    return matcher.run(calls, rng);
}

OutcomeDistribution exact_distribution(std::span<const RecruitCall> calls) {
    check_unique(calls);
    const std::size_t m = calls.size();
    if (m > kExactMatcherLimit)
        throw std::invalid_argument(fmt::format(
            "exact_distribution: {} callers exceeds the enumeration limit of {}", m,
            kExactMatcherLimit));

    const auto active = static_cast<std::size_t>(
        std::count_if(calls.begin(), calls.end(), [](const auto& c) { return c.active; }));
    std::uint64_t sequences = 1; // m^|S|
    for (std::size_t i = 0; i < active; ++i) sequences *= m;

    std::map<MatchOutcome, std::uint64_t> tally;
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::uint64_t total = 0;
    std::vector<std::size_t> choice(active);
    do {
        for (std::uint64_t seq = 0; seq < sequences; ++seq) {
            // Decode seq as |S| base-m digits; the t-th attempt uses digit t.
            std::uint64_t rest = seq;
            for (auto& c : choice) {
                c = rest % m;
                rest /= m;
            }

            std::set<std::size_t> first, second;
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            std::size_t used = 0;
            for (const auto a : perm) {
                if (!calls[a].active || second.count(a)) continue;
                const auto b = choice[used++];
                if (first.count(b) || second.count(b)) continue;
                first.insert(a);
                second.insert(b);
                pairs.emplace_back(a, b);
            }

            MatchOutcome out;
            out.returned.resize(m);
            out.indicator.assign(m, 0);
            for (std::size_t a = 0; a < m; ++a) out.returned[a] = calls[a].target;
            for (const auto& [r, s] : pairs) {
                out.pairs.emplace_back(calls[r].ant, calls[s].ant);
                out.returned[s] = calls[r].target;
                if (r != s) {
                    out.indicator[r] = 1;
                    out.indicator[s] = -1;
                }
            }
            std::sort(out.pairs.begin(), out.pairs.end());
            ++tally[out];
            ++total;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    OutcomeDistribution dist;
    for (auto& [outcome, count] : tally) {
        const auto g = std::gcd(count, total);
        dist.emplace(outcome, Probability{count / g, total / g});
    }
    return dist;
}

int success_indicator(const MatchOutcome& outcome, AntId ant) {
    for (const auto& [r, s] : outcome.pairs) {
        if (r == s) continue;
        if (r == ant) return 1;
        if (s == ant) return -1;
    }
    return 0;
}

} // namespace hh
