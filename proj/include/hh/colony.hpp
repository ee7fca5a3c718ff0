#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hh {

using AntId = std::uint32_t;

/// Index of a nest: 0 is the home nest, 1..k are candidate nests.
struct NestId {
    std::uint32_t value = 0;

    constexpr NestId() = default;
    constexpr explicit NestId(std::uint32_t v) : value(v) {}

    constexpr bool is_home() const { return value == 0; }
    constexpr auto operator<=>(const NestId&) const = default;
};

inline constexpr NestId kHome{0};

enum class Algorithm { optimal, simple };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);

/// Raised when an ant program issues a primitive whose precondition does
/// not hold. Signals a bug in the program, never bad luck.
class PreconditionViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Experiment definition for a single colony run.
struct ColonyConfig {
    std::uint32_t n = 1;
    std::uint32_t k = 1;
    std::vector<std::uint8_t> qualities{1}; ///< qualities[i-1] is q(i), each 0 or 1
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::simple;
    std::uint32_t max_rounds = 0; ///< 0 selects default_max_rounds()

    /// 200 * k * ceil(log2 n), at least 1.
    std::uint32_t default_max_rounds() const;
    std::uint32_t round_cap() const { return max_rounds ? max_rounds : default_max_rounds(); }

    /// Throws std::invalid_argument on hard violations (n or k zero,
    /// wrong quality count, non-binary quality, no good nest). Returns
    /// warnings for parameters outside the analyzed k regime.
    std::vector<std::string> validate() const;
};

/// Builds a config from flat key=value text (keys: algo, n, k, qualities,
/// seed, max-rounds). Blank lines and lines starting with '#' are ignored.
ColonyConfig parse_config(std::string_view text);

/// q(i) for a candidate nest. Throws std::out_of_range for the home nest or
/// ids above k.
std::uint8_t quality(const ColonyConfig& config, NestId nest);

struct Search {};
struct Go {
    NestId target;
};
struct Recruit {
    bool active = false;
    NestId target;
};
using ActionRequest = std::variant<Search, Go, Recruit>;

struct SearchResult {
    NestId nest;
    std::uint8_t quality = 0;
    std::uint32_t count = 0;
};
struct GoResult {
    std::uint32_t count = 0;
};
struct RecruitResult {
    NestId nest;
    std::uint32_t home_count = 0;
};
using ActionResult = std::variant<SearchResult, GoResult, RecruitResult>;

/// Locations and visit histories of all ants.
class WorldState {
public:
    WorldState(std::uint32_t n, std::uint32_t k);

    std::uint32_t n() const { return static_cast<std::uint32_t>(location_.size()); }
    std::uint32_t k() const { return k_; }
    std::uint32_t round() const { return round_; }
    void set_round(std::uint32_t r) { round_ = r; }

    NestId location(AntId ant) const { return location_.at(ant); }
    const std::vector<NestId>& locations() const { return location_; }

    /// Moves an ant and records the nest in its history.
    void place(AntId ant, NestId nest);

    /// Marks a nest as known without moving the ant. Used for the nest an
    /// ant is led to by a successful recruitment.
    void learn(AntId ant, NestId nest);

    bool visited(AntId ant, NestId nest) const;
    std::vector<NestId> visited_set(AntId ant) const;

private:
    std::uint32_t k_;
    std::uint32_t round_ = 0;
    std::vector<NestId> location_;
    std::vector<std::uint8_t> visited_; // n x (k+1), row-major
};

/// Checks the Go/Recruit precondition. Returns an empty optional when the
/// request is admissible, otherwise a description of the violation.
std::optional<std::string> validate_request(const WorldState& world, AntId ant,
                                            const ActionRequest& req);

/// c(i, r) for i = 0..k.
std::vector<std::uint32_t> counts(const WorldState& world);

} // namespace hh
