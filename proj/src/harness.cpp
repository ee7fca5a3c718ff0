#include "hh/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace hh {

QualityPattern QualityPattern::parse(std::string_view text) {
    if (text == "one-good") return {Kind::one_good, 0.5};
    if (text == "all-good") return {Kind::all_good, 0.5};
    std::string_view arg;
    if (text.starts_with("random:")) arg = text.substr(7);
    else if (text.starts_with("random(") && text.ends_with(")")) arg = text.substr(7, text.size() - 8);
    else throw std::invalid_argument(fmt::format("unknown quality pattern '{}'", text));
    double p = 0;
    try {
        std::size_t used = 0;
        p = std::stod(std::string(arg), &used);
        if (used != arg.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("bad probability in quality pattern '{}'", text));
    }
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("random quality probability must be in (0, 1]");
    return {Kind::random, p};
}

std::string QualityPattern::to_string() const {
    switch (kind) {
    case Kind::one_good: return "one-good";
    case Kind::all_good: return "all-good";
    case Kind::random: return fmt::format("random:{}", p);
    }
    return "?";
}

std::vector<std::uint8_t> QualityPattern::draw(std::uint32_t k, Rng& rng) const {
    std::vector<std::uint8_t> q(k, 0);
    switch (kind) {
    case Kind::one_good:
        if (k > 0) q[0] = 1;
        break;
    case Kind::all_good:
        std::fill(q.begin(), q.end(), 1);
        break;
    case Kind::random:
        do {
            for (auto& x : q) x = rng.unit() < p ? 1 : 0;
        } while (k > 0 && std::none_of(q.begin(), q.end(), [](auto x) { return x == 1; }));
        break;
    }
    return q;
}

void ExperimentSpec::validate() const {
    if (trials == 0) throw std::invalid_argument("experiment: trials must be at least 1");
    if (ns.empty()) throw std::invalid_argument("experiment: n list must not be empty");
    if (ks.empty()) throw std::invalid_argument("experiment: k list must not be empty");
}

ColonyConfig trial_config(const ExperimentSpec& spec, std::size_t cell, std::uint32_t n,
                          std::uint32_t k, std::uint32_t trial) {
    const std::uint64_t seed = derive_seed(derive_seed(spec.seed, cell), trial);
    Rng quality_rng(mix64(seed ^ 0x5175616c69747921ULL));
    ColonyConfig config;
    config.algorithm = spec.algorithm;
    config.n = n;
    config.k = k;
    config.seed = seed;
    config.max_rounds = spec.max_rounds;
    config.qualities = spec.pattern.draw(k, quality_rng);
    return config;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

CellResult run_cell(const ExperimentSpec& spec, std::size_t cell, std::uint32_t n, std::uint32_t k) {
    CellResult result;
    result.algorithm = spec.algorithm;
    result.n = n;
    result.k = k;
    try {
        trial_config(spec, cell, n, k, 0).validate();
    } catch (const std::exception& e) {
        result.error = e.what();
        return result;
    }
    result.trials.resize(spec.trials);
    RunOptions options;
    options.record_trace = false;
    options.extra_rounds = spec.extra_rounds;
    parallel_for(spec.trials, spec.threads, [&](std::size_t t) {
        auto config = trial_config(spec, cell, n, k, static_cast<std::uint32_t>(t));
        result.trials[t].report = run(config, options).report;
        result.trials[t].qualities = std::move(config.qualities);
    });
    return result;
}

std::vector<CellResult> sweep_cells(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<CellResult> cells;
    std::size_t cell = 0;
    for (const auto n : spec.ns)
        for (const auto k : spec.ks) cells.push_back(run_cell(spec, cell++, n, k));
    return cells;
}

std::vector<SummaryRow> sweep(const ExperimentSpec& spec) {
    std::vector<SummaryRow> rows;
    for (const auto& cell : sweep_cells(spec)) rows.push_back(summarize(cell));
    return rows;
}

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryRow summarize(const CellResult& cell) {
    SummaryRow row;
    row.algorithm = std::string(to_string(cell.algorithm));
    row.n = cell.n;
    row.k = cell.k;
    row.trials = static_cast<std::uint32_t>(cell.trials.size());
    row.error = cell.error;
    std::vector<double> rounds;
    for (const auto& t : cell.trials)
        if (t.report.converged) rounds.push_back(*t.report.rounds_to_converge);
    row.converged = static_cast<std::uint32_t>(rounds.size());
    if (rounds.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.median_rounds = row.mean_rounds = row.p10_rounds = row.p90_rounds = nan;
        return row;
    }
    std::sort(rounds.begin(), rounds.end());
    row.median_rounds = percentile(rounds, 0.5);
    row.mean_rounds = std::accumulate(rounds.begin(), rounds.end(), 0.0) / rounds.size();
    row.p10_rounds = percentile(rounds, 0.1);
    row.p90_rounds = percentile(rounds, 0.9);
    row.min_rounds = static_cast<std::uint32_t>(rounds.front());
    row.max_rounds = static_cast<std::uint32_t>(rounds.back());
    return row;
}

namespace {

constexpr std::string_view kHeader =
    "algorithm,n,k,trials,converged,median_rounds,mean_rounds,p10_rounds,p90_rounds,min_rounds,"
    "max_rounds,error";

std::string number(double x) {
    if (std::isnan(x)) return "";
    return fmt::format("{:.3f}", x);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

} // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << kSummaryCsvVersion << '\n' << kHeader << '\n';
    for (const auto& r : rows) {
        const bool any = r.converged > 0;
        out << r.algorithm << ',' << r.n << ',' << r.k << ',' << r.trials << ',' << r.converged << ','
            << number(r.median_rounds) << ',' << number(r.mean_rounds) << ','
            << number(r.p10_rounds) << ',' << number(r.p90_rounds) << ','
            << (any ? std::to_string(r.min_rounds) : "") << ','
            << (any ? std::to_string(r.max_rounds) : "") << ',' << csv_field(r.error) << '\n';
    }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::vector<SummaryRow> rows;
    std::string line;
    bool header_seen = false;
    const auto to_double = [](const std::string& s) {
        return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    const auto to_u32 = [](const std::string& s) {
        return s.empty() ? 0u : static_cast<std::uint32_t>(std::stoul(s));
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kHeader) throw std::invalid_argument("summary csv: unexpected header");
            header_seen = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 12)
            throw std::invalid_argument(fmt::format("summary csv: expected 12 fields, got {}", f.size()));
        SummaryRow r;
        r.algorithm = f[0];
        r.n = to_u32(f[1]);
        r.k = to_u32(f[2]);
        r.trials = to_u32(f[3]);
        r.converged = to_u32(f[4]);
        r.median_rounds = to_double(f[5]);
        r.mean_rounds = to_double(f[6]);
        r.p10_rounds = to_double(f[7]);
        r.p90_rounds = to_double(f[8]);
        r.min_rounds = to_u32(f[9]);
        r.max_rounds = to_u32(f[10]);
        r.error = f[11];
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw std::invalid_argument("summary csv: missing header");
    return rows;
}

ScalingModel parse_scaling_model(std::string_view text) {
    if (text == "log" || text == "log-n" || text == "a*log(n)") return ScalingModel::log_n;
    if (text == "klog" || text == "k-log-n" || text == "a*k*log(n)") return ScalingModel::k_log_n;
    throw std::invalid_argument(fmt::format("unknown scaling model '{}'", text));
}

ScalingFit fit_scaling(const std::vector<SummaryRow>& rows, ScalingModel model) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.converged == 0 || std::isnan(r.median_rounds) || r.n == 0) continue;
        const double logn = std::log2(static_cast<double>(r.n));
        xs.push_back(model == ScalingModel::log_n ? logn : r.k * logn);
        ys.push_back(r.median_rounds);
    }
    if (xs.size() < 3) throw std::invalid_argument("fit_scaling: needs at least three rows");
    const double count = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 1e-12 * std::max(1.0, mx * mx))
        throw std::invalid_argument("fit_scaling: regressor is constant across rows");

    ScalingFit fit;
    fit.points = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0) {
        double ss_res = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss_res += e * e;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

} // namespace hh
