#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "hh/colony.hpp"
#include "hh/rng.hpp"

namespace hh {

struct RecruitCall {
    AntId ant = 0;
    bool active = false;
    NestId target;
};

/// Result of one recruitment round at the home nest.
///
/// `pairs` holds (recruiter, recruited) in ascending recruiter order; a
/// pair (a, a) is an inert self-recruitment. `returned` and `indicator`
/// are indexed like the input calls.
struct MatchOutcome {
    std::vector<std::pair<AntId, AntId>> pairs;
    std::vector<NestId> returned;
    std::vector<std::int8_t> indicator; ///< +1 recruited someone, -1 was recruited, 0 otherwise

    auto operator<=>(const MatchOutcome& other) const {
        if (auto c = pairs <=> other.pairs; c != 0) return c;
        return returned <=> other.returned;
    }
    bool operator==(const MatchOutcome& other) const {
        return pairs == other.pairs && returned == other.returned;
    }
};

/// Random pairing of recruiters and recruits.
///
/// Ants are visited in a uniformly random order. An active ant that has
/// not been recruited yet draws a partner uniformly from all callers
/// (itself included); the pair is kept only if the partner has neither
/// recruited nor been recruited. Randomness is consumed in a fixed order:
/// the shuffle first, then one draw per attempting ant in visiting order.
///
/// Throws std::invalid_argument on an empty call set or a repeated ant.
MatchOutcome match_round(std::span<const RecruitCall> calls, Rng& rng);

/// Reusable-buffer form of match_round for hot loops. Produces the same
/// outcome as match_round for the same stream state.
class Matcher {
public:
    const MatchOutcome& run(std::span<const RecruitCall> calls, Rng& rng);

private:
    MatchOutcome outcome_;
    std::vector<std::uint32_t> order_;
    std::vector<std::int32_t> recruited_by_; // call index of recruiter, -1 if none
    std::vector<std::uint8_t> recruited_someone_;
};

/// Exact probability as a reduced fraction.
struct Probability {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Probability&) const = default;
};

using OutcomeDistribution = std::map<MatchOutcome, Probability>;

inline constexpr std::size_t kExactMatcherLimit = 6;

/// Enumerates every permutation and partner choice of the matching process
/// and returns the exact distribution over outcomes (indicator vectors are
/// filled in each key). Throws std::invalid_argument above kExactMatcherLimit
/// callers.
OutcomeDistribution exact_distribution(std::span<const RecruitCall> calls);

/// X for one ant: +1 if it recruited another ant, -1 if another ant
/// recruited it, 0 otherwise (self-pairs count as 0).
int success_indicator(const MatchOutcome& outcome, AntId ant);

} // namespace hh
