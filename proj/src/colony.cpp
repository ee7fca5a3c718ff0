#include "hh/colony.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

namespace hh {

namespace {

// Constants of the analyzed regime (high-probability exponent c, simple
// algorithm spread constant d).
constexpr double kRegimeC = 1.0;
constexpr double kRegimeD = 64.0;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument(fmt::format("config: bad value for '{}': '{}'", key, text));
    return value;
}

} // namespace

std::string_view to_string(Algorithm algo) {
    return algo == Algorithm::optimal ? "optimal" : "simple";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "optimal") return Algorithm::optimal;
    if (name == "simple") return Algorithm::simple;
    throw std::invalid_argument(fmt::format("unknown algorithm '{}'", name));
}

std::uint32_t ColonyConfig::default_max_rounds() const {
    std::uint32_t log2n = 0;
    while ((std::uint64_t{1} << log2n) < n) ++log2n;
    return std::max<std::uint32_t>(1, 200 * k * log2n);
}

std::vector<std::string> ColonyConfig::validate() const {
    if (n == 0) throw std::invalid_argument("config: n must be positive");
    if (k == 0) throw std::invalid_argument("config: k must be positive");
    if (qualities.size() != k)
        throw std::invalid_argument(
            fmt::format("config: expected {} qualities, got {}", k, qualities.size()));
    if (std::any_of(qualities.begin(), qualities.end(), [](auto q) { return q > 1; }))
        throw std::invalid_argument("config: qualities must be 0 or 1");
    if (std::none_of(qualities.begin(), qualities.end(), [](auto q) { return q == 1; }))
        throw std::invalid_argument("config: at least one nest must have quality 1");

    std::vector<std::string> warnings;
    const double logn = std::log(static_cast<double>(std::max<std::uint32_t>(n, 2)));
    if (algorithm == Algorithm::optimal) {
        const double bound = n / (12.0 * (kRegimeC + 1.0) * logn);
        if (k > bound)
            warnings.push_back(fmt::format(
                "k={} exceeds the analyzed regime k <= n/(12(c+1) ln n) = {:.3f}", k, bound));
    } else {
        const double bound = std::sqrt(n / (8.0 * kRegimeD * kRegimeD * (kRegimeC + 6.0) * logn));
        if (k > bound)
            warnings.push_back(fmt::format(
                "k={} exceeds the analyzed regime k <= sqrt(n/(8 d^2 (c+6) ln n)) = {:.3f}", k,
                bound));
    }
    return warnings;
}

ColonyConfig parse_config(std::string_view text) {
    ColonyConfig config;
    std::string qualities_text;
    bool have_k = false;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(fmt::format("config: expected key=value, got '{}'", line));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "algo" || key == "algorithm") config.algorithm = parse_algorithm(value);
        else if (key == "n") config.n = parse_number<std::uint32_t>(key, value);
        else if (key == "k") { config.k = parse_number<std::uint32_t>(key, value); have_k = true; }
        else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "max-rounds" || key == "max_rounds")
            config.max_rounds = parse_number<std::uint32_t>(key, value);
        else if (key == "qualities") qualities_text = std::string(value);
        else throw std::invalid_argument(fmt::format("config: unknown key '{}'", key));
    }
    if (!have_k) throw std::invalid_argument("config: missing k");

    config.qualities.assign(config.k, 0);
    if (qualities_text.empty() || qualities_text == "one-good") {
        config.qualities[0] = 1;
    } else if (qualities_text == "all-good") {
        std::fill(config.qualities.begin(), config.qualities.end(), 1);
    } else {
        config.qualities.clear();
        std::string_view rest = qualities_text;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            config.qualities.push_back(
                parse_number<std::uint8_t>("qualities", trim(rest.substr(0, comma))));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    config.validate();
    return config;
}

std::uint8_t quality(const ColonyConfig& config, NestId nest) {
    if (nest.is_home() || nest.value > config.k)
        throw std::out_of_range(fmt::format("quality: nest {} is not a candidate nest", nest.value));
    return config.qualities[nest.value - 1];
}

WorldState::WorldState(std::uint32_t n, std::uint32_t k)
    : k_(k), location_(n, kHome), visited_(static_cast<std::size_t>(n) * (k + 1), 0) {}

void WorldState::place(AntId ant, NestId nest) {
    location_.at(ant) = nest;
    learn(ant, nest);
}

void WorldState::learn(AntId ant, NestId nest) {
    if (nest.value > k_) throw std::out_of_range("WorldState: nest id above k");
    visited_[static_cast<std::size_t>(ant) * (k_ + 1) + nest.value] = 1;
}

bool WorldState::visited(AntId ant, NestId nest) const {
    if (nest.value > k_ || ant >= n()) return false;
    return visited_[static_cast<std::size_t>(ant) * (k_ + 1) + nest.value] != 0;
}

std::vector<NestId> WorldState::visited_set(AntId ant) const {
    std::vector<NestId> out;
    for (std::uint32_t i = 0; i <= k_; ++i)
        if (visited(ant, NestId{i})) out.push_back(NestId{i});
    return out;
}

std::optional<std::string> validate_request(const WorldState& world, AntId ant,
                                            const ActionRequest& req) {
    if (ant >= world.n()) return fmt::format("ant {} does not exist", ant);
    const auto check_target = [&](NestId target, std::string_view what) -> std::optional<std::string> {
        if (target.is_home() || target.value > world.k())
            return fmt::format("ant {}: {} to non-candidate nest {}", ant, what, target.value);
        if (!world.visited(ant, target))
            return fmt::format("ant {}: {} to unvisited nest {}", ant, what, target.value);
        return std::nullopt;
    };
    return std::visit(
        [&](const auto& r) -> std::optional<std::string> {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Search>) return std::nullopt;
            else if constexpr (std::is_same_v<T, Go>) return check_target(r.target, "go");
            else return check_target(r.target, "recruit");
        },
        req);
}

std::vector<std::uint32_t> counts(const WorldState& world) {
    std::vector<std::uint32_t> c(world.k() + 1, 0);
    for (const auto& loc : world.locations()) ++c[loc.value];
    return c;
}

} // namespace hh
