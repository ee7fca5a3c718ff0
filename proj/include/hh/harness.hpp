#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hh/colony.hpp"
#include "hh/engine.hpp"
#include "hh/rng.hpp"

namespace hh {

struct QualityPattern {
    enum class Kind { one_good, all_good, random };
    Kind kind = Kind::one_good;
    double p = 0.5; ///< per-nest probability of quality 1 for Kind::random

    /// Accepts "one-good", "all-good", "random:P" and "random(P)".
    static QualityPattern parse(std::string_view text);
    std::string to_string() const;

    /// Qualities for k nests. random redraws until at least one nest is good.
    std::vector<std::uint8_t> draw(std::uint32_t k, Rng& rng) const;
};

struct ExperimentSpec {
    Algorithm algorithm = Algorithm::simple;
    std::vector<std::uint32_t> ns;
    std::vector<std::uint32_t> ks;
    QualityPattern pattern;
    std::uint32_t trials = 1;
    std::uint64_t seed = 0;
    std::uint32_t max_rounds = 0;    ///< 0 selects the per-config default
    std::uint32_t extra_rounds = 0;  ///< rounds run past convergence
    unsigned threads = 0;            ///< 0 selects hardware concurrency

    void validate() const;
};

struct TrialOutcome {
    std::vector<std::uint8_t> qualities;
    ConvergenceReport report;
};

/// Every trial of one (n, k) cell, in trial order.
struct CellResult {
    Algorithm algorithm = Algorithm::simple;
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::vector<TrialOutcome> trials;
    std::string error;
};

struct SummaryRow {
    std::string algorithm;
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint32_t trials = 0;
    std::uint32_t converged = 0;
    double median_rounds = 0;
    double mean_rounds = 0;
    double p10_rounds = 0;
    double p90_rounds = 0;
    std::uint32_t min_rounds = 0;
    std::uint32_t max_rounds = 0;
    std::string error;
};

/// Config used for trial `trial` of cell `cell` (cells numbered in
/// (n, k) order).
ColonyConfig trial_config(const ExperimentSpec& spec, std::size_t cell, std::uint32_t n,
                          std::uint32_t k, std::uint32_t trial);

CellResult run_cell(const ExperimentSpec& spec, std::size_t cell, std::uint32_t n, std::uint32_t k);

/// Runs every (n, k) cell. A cell whose configuration is rejected yields
/// a row carrying the error instead of aborting the sweep.
std::vector<CellResult> sweep_cells(const ExperimentSpec& spec);
std::vector<SummaryRow> sweep(const ExperimentSpec& spec);

SummaryRow summarize(const CellResult& cell);

/// Linear-interpolated percentile (q in [0, 1]) of a sorted sample.
double percentile(const std::vector<double>& sorted, double q);

inline constexpr std::string_view kSummaryCsvVersion = "# hhsim summary v1";

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

enum class ScalingModel { log_n, k_log_n };
ScalingModel parse_scaling_model(std::string_view text);

struct ScalingFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::size_t points = 0;
};

/// Least squares of median rounds on log2 n (or k log2 n), with intercept.
/// R^2 is reported as 0 when the medians have no variance. Rows without a
/// converged trial are skipped. Throws std::invalid_argument for fewer than
/// three usable rows or a constant regressor.
ScalingFit fit_scaling(const std::vector<SummaryRow>& rows, ScalingModel model);

} // namespace hh
