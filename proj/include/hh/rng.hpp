#pragma once

#include <cstdint>
#include <random>

namespace hh {

/// Seeded pseudo-random stream used by every stochastic component.
///
/// The engine is std::mt19937_64; the derived draws (bounded integers,
/// unit doubles, rational Bernoulli trials) are implemented here rather
/// than through <random> distributions, whose output is not specified
/// bit-for-bit by the standard. Traces therefore replay identically on
/// every conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability exactly numerator/denominator.
    bool chance(std::uint64_t numerator, std::uint64_t denominator) {
        return below(denominator) < numerator;
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to spread seeds before they reach the engine.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream for trial `trial_index` of an experiment seeded with
/// `master_seed`.
Rng derive_trial_stream(std::uint64_t master_seed, std::uint64_t trial_index);

/// Seed (rather than stream) form of derive_trial_stream, for code that
/// stores seeds in configs.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

} // namespace hh
