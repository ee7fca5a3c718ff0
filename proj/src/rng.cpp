#include "hh/rng.hpp"

#include <limits>
#include <stdexcept>

namespace hh {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    // Rejection sampling on the largest multiple of bound.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

Rng derive_trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    return Rng(derive_seed(master_seed, trial_index));
}

} // namespace hh
