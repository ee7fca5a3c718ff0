#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hh/colony.hpp"

namespace hh::lemma {

/// Running mean and variance (Welford).
class Moments {
public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
    /// sample-std / sqrt(count)
    double standard_error() const {
        return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// A group of ants waiting at the home nest, committed to `nest`.
struct Cohort {
    NestId nest;
    std::uint32_t count = 0;
    bool active = true;
};

struct ScenarioSpec {
    std::vector<Cohort> home;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

/// One checked quantity.
struct Estimate {
    std::string name;
    double value = 0.0;
    double standard_error = 0.0;
    std::string relation; ///< ">=" or "<=" against `bound`, or "" if informational
    double bound = 0.0;
    double margin = 0.0;  ///< allowance in standard errors
    bool pass = true;
};

struct EstimateReport {
    std::string check;
    std::uint64_t trials = 0;
    std::vector<Estimate> estimates;
    nlohmann::json details = nlohmann::json::object();
    bool pass = true;

    const Estimate& at(std::string_view name) const;
};

nlohmann::json to_json(const EstimateReport& report);

/// value >= bound - margin * se
Estimate at_least(std::string name, double value, double se, double bound, double margin);
/// value <= bound + margin * se
Estimate at_most(std::string name, double value, double se, double bound, double margin);
Estimate info(std::string name, double value, double se = 0.0);

/// Frequency with which the first ant of the first active cohort recruits
/// another ant (non-self pair). Checked against 1/16 with a 3 SE margin.
/// Throws std::invalid_argument for fewer than two ants at home or no
/// active ant.
EstimateReport recruit_success_rate(const ScenarioSpec& spec);

/// Rumor spreading with the recruitment process: every informed ant calls
/// recruit(1, w) each round, every ignorant ant calls recruit(0, .). Starts
/// with one informed ant. Reports the per-round probability that an
/// ignorant ant stays ignorant (checked against 1/4) and the distribution
/// of rounds until everyone is informed. `rounds` caps each trial.
EstimateReport ignorance_retention(std::uint32_t n, std::uint32_t rounds, std::uint64_t trials,
                                   std::uint64_t seed);

/// Per-cohort net change Y of one all-active recruitment round. Checks
/// |P[Y<0] - P[Y>0]| <= 4 SE for every cohort and, for cohorts that are a
/// strict subset of the home population, P[Y<0] >= 1/66 (3 SE margin).
EstimateReport nest_delta_distribution(const ScenarioSpec& spec);

enum class GapMode { exact, monte_carlo };

/// Expected relative gap between nests 1 and 2 after the initial search of
/// n ants over k nests. Samples where either nest is empty are excluded
/// from the conditioned mean and contribute 0 to the unconditioned mean,
/// which is the quantity checked against 1/(3(n-1)). Exact mode needs k=2,
/// 2 <= n <= 30.
EstimateReport initial_gap_expectation(std::uint32_t n, std::uint32_t k, GapMode mode,
                                       std::uint64_t trials, std::uint64_t seed);

struct GrowthParams {
    double d = 64.0;
};

/// One recruitment round of the simple algorithm starting from nests 1
/// and 2 holding sizes.first and sizes.second ants (the rest spread over
/// nests 3..k). Checks mean gap after >= (1 + 1/(2dk)) * gap before - 3 SE.
/// Throws std::invalid_argument if a size is below n/(dk) or the sizes do
/// not fit.
EstimateReport ratio_growth(std::uint32_t n, std::uint32_t k,
                            std::pair<std::uint32_t, std::uint32_t> sizes, std::uint64_t trials,
                            std::uint64_t seed, GrowthParams params = {});

struct DropoutParams {
    double c = 1.0;
    double d = 64.0;
};

/// Simple-algorithm dynamics with nest 1 seeded at `small` ants and the
/// rest spread over nests 2..k. Checks that at least 99% of trials empty
/// nest 1 within 64 (c+4) k ln n rounds. Throws std::invalid_argument if
/// small > n/(dk) or k < 2.
EstimateReport dropout_time(std::uint32_t n, std::uint32_t k, std::uint32_t small,
                            std::uint64_t trials, std::uint64_t seed, DropoutParams params = {});

} // namespace hh::lemma
