#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "confres/csv.hpp"
#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/prioritization.hpp"
#include "confres/resolution.hpp"
#include "confres/rng.hpp"
#include "confres/toml.hpp"

namespace confres {

enum class DistKind { Normal, Uniform, Triangular };

inline std::string dist_kind_name(DistKind k) {
    switch (k) {
        case DistKind::Normal: return "normal";
        case DistKind::Uniform: return "uniform";
        case DistKind::Triangular: return "triangular";
    }
    return "normal";
}

inline DistKind parse_dist_kind(const std::string& name) {
    if (name == "normal") return DistKind::Normal;
    if (name == "uniform") return DistKind::Uniform;
    if (name == "triangular") return DistKind::Triangular;
    throw Error("evaluation", "BadDistribution", "unknown distribution '" + name + "'");
}

/// Ground-truth generator parameters. mean/stddev apply to Normal, min/max
/// to Uniform and Triangular, mode to Triangular only.
struct DistributionSpec {
    DistKind kind = DistKind::Normal;
    double mean = 0;
    double stddev = 1;
    double min = 0;
    double max = 0;
    double mode = 0;
};

inline std::optional<Error> validate_distribution(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Normal:
            if (d.stddev < 0) return Error("evaluation", "BadDistribution", "stddev < 0");
            break;
        case DistKind::Uniform:
            if (d.min > d.max) return Error("evaluation", "BadDistribution", "min > max");
            break;
        case DistKind::Triangular:
            if (d.min > d.max || d.mode < d.min || d.mode > d.max)
                return Error("evaluation", "BadDistribution", "need min <= mode <= max");
            break;
    }
    return std::nullopt;
}

/// One variate. Normal uses the Box-Muller transform, Triangular the inverse
/// CDF; both are plain deterministic functions of the generator's uniforms,
/// so a fixed (seed, stream) reproduces the draw exactly on any platform.
inline double sample(const DistributionSpec& d, rng::Philox& gen) {
    switch (d.kind) {
        case DistKind::Normal: {
            double u1 = gen.next_u01_open();
            double u2 = gen.next_u01();
            double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            return d.mean + d.stddev * z;
        }
        case DistKind::Uniform:
            return d.min + gen.next_u01() * (d.max - d.min);
        case DistKind::Triangular: {
            double span = d.max - d.min;
            if (span <= 0) return d.min;
            double u = gen.next_u01();
            double cut = (d.mode - d.min) / span;
            if (u <= cut) return d.min + std::sqrt(u * span * (d.mode - d.min));
            return d.max - std::sqrt((1.0 - u) * span * (d.max - d.mode));
        }
    }
    return d.mean;
}

inline double dist_mean(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Normal: return d.mean;
        case DistKind::Uniform: return (d.min + d.max) / 2.0;
        case DistKind::Triangular: return (d.min + d.mode + d.max) / 3.0;
    }
    return d.mean;
}

inline double dist_median(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::Normal: return d.mean;
        case DistKind::Uniform: return (d.min + d.max) / 2.0;
        case DistKind::Triangular: {
            double span = d.max - d.min;
            if (span <= 0) return d.min;
            if (d.mode - d.min >= span / 2.0)
                return d.min + std::sqrt(span * (d.mode - d.min) / 2.0);
            return d.max - std::sqrt(span * (d.max - d.mode) / 2.0);
        }
    }
    return d.mean;
}

/// derive_distribution_params output: the spec plus whether the history
/// fallback fired.
struct DerivedDistribution {
    DistributionSpec spec;
    bool history_fallback = false;
};

/// Parameterizes the ground-truth distribution from context: the top-ranked
/// (advantaged) resident's current preference averaged with the other
/// participants' historical values for the same service and attribute.
/// Profiles carry no context timeline, so "their preference under the
/// advantaged context" is approximated by their full service history. With
/// no history the mean falls back to the preference midpoint, flagged.
inline DerivedDistribution derive_distribution_params(
    DistKind kind, const ConflictCase& conflict, const ServiceEventLog& history,
    const ProfileMap& profiles, const ahp::RandomIndexTable& ri,
    const TemplateOverrides* overrides = nullptr, double sigma = 1.0) {
    std::vector<double> prefs;
    for (const auto& p : conflict.participants) {
        if (!is_numeric(p.preferred_value))
            throw Error("evaluation", "NonNumericAttribute",
                        "cannot derive a distribution for non-numeric '" + conflict.attribute + "'");
        prefs.push_back(as_number(p.preferred_value));
    }
    double lo = *std::min_element(prefs.begin(), prefs.end());
    double hi = *std::max_element(prefs.begin(), prefs.end());

    DerivedDistribution out;
    out.spec.kind = kind;
    out.spec.min = lo;
    out.spec.max = hi;
    out.spec.stddev = sigma;
    if (kind == DistKind::Uniform) return out;

    auto ranking = rank_residents(conflict, profiles, ri, overrides);
    const std::string& advantaged = ranking.front().resident_id;
    double advantaged_pref = 0;
    for (std::size_t i = 0; i < conflict.participants.size(); ++i)
        if (conflict.participants[i].resident_id == advantaged) advantaged_pref = prefs[i];

    // per-resident mean of historical requests, then mean across residents
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const ServiceEvent& e : history.events()) {
        if (e.service_id != conflict.service_id || e.user == advantaged) continue;
        bool is_participant = false;
        for (const auto& p : conflict.participants)
            is_participant = is_participant || p.resident_id == e.user;
        if (!is_participant) continue;
        auto it = e.attr_snapshot.find(conflict.attribute);
        if (it == e.attr_snapshot.end() || !is_numeric(it->second)) continue;
        auto& [sum, count] = sums[e.user];
        sum += as_number(it->second);
        ++count;
    }

    double mean;
    if (sums.empty()) {
        mean = (lo + hi) / 2.0;
        out.history_fallback = true;
    } else {
        double acc = 0;
        for (const auto& [user, sc] : sums) acc += sc.first / double(sc.second);
        double historical = acc / double(sums.size());
        mean = (advantaged_pref + historical) / 2.0;
    }
    out.spec.mean = mean;
    out.spec.mode = std::clamp(mean, lo, hi);
    return out;
}

/// One conflict with the strategies' proposed setpoints pinned; trials vary
/// only the sampled ground truth.
struct ExperimentFixture {
    std::string name;
    DistributionSpec dist;
    std::map<std::string, double> setpoints;  // strategy name -> proposed value
};

struct ExperimentConfig {
    std::vector<ExperimentFixture> fixtures;
    std::vector<std::string> strategies;
    std::vector<int> batch_sizes = {200, 400, 600, 800, 1000};
    std::uint64_t seed = 0;
    std::string baseline = "average";  // ties go against the adaptive approach
    std::string distribution_label;
};

inline std::optional<Error> validate_experiment(const ExperimentConfig& cfg) {
    if (cfg.fixtures.empty())
        return Error("evaluation", "BadExperiment", "no fixtures");
    if (cfg.strategies.size() < 2)
        return Error("evaluation", "BadExperiment", "need at least two strategies");
    int prev = 0;
    for (int b : cfg.batch_sizes) {
        if (b <= prev) return Error("evaluation", "BadExperiment",
                                    "batch sizes must be positive and ascending");
        prev = b;
    }
    for (const auto& f : cfg.fixtures) {
        if (auto err = validate_distribution(f.dist)) return err;
        for (const auto& s : cfg.strategies)
            if (!f.setpoints.count(s))
                return Error("evaluation", "BadExperiment",
                             "fixture '" + f.name + "' lacks a setpoint for strategy '" + s + "'");
    }
    return std::nullopt;
}

/// Win fractions per batch size and strategy, plus the metadata needed to
/// reproduce them.
struct AccuracyReport {
    std::vector<int> batch_sizes;
    std::vector<std::string> strategies;
    std::map<int, std::map<std::string, double>> win_fraction;  // batch -> strategy -> fraction
    std::string distribution;
    std::string fixture;
    std::uint64_t seed = 0;
};

/// Closest setpoint to the sampled truth wins; exact ties are credited to
/// the baseline, never the adaptive strategy.
inline std::string run_trial(const std::map<std::string, double>& decisions, double ground_truth,
                             const std::string& baseline) {
    if (decisions.size() < 2)
        throw Error("evaluation", "BadExperiment", "a trial needs at least two strategies");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [name, sp] : decisions) best = std::min(best, std::fabs(sp - ground_truth));
    std::vector<std::string> winners;
    for (const auto& [name, sp] : decisions)
        if (std::fabs(sp - ground_truth) == best) winners.push_back(name);
    if (winners.size() == 1) return winners.front();
    for (const auto& w : winners)
        if (w == baseline) return w;
    for (const auto& w : winners)
        if (w != "adaptive") return w;  // winners is sorted: map iteration order
    return winners.front();
}

/// Per-trial substream id; fixtures and trials never share draws.
inline std::uint64_t trial_stream(std::size_t fixture_index, int trial) {
    return (std::uint64_t(fixture_index) << 32) | std::uint64_t(std::uint32_t(trial));
}

/// Runs every batch size over every fixture. Trial t of a fixture always
/// uses the same substream regardless of batch size or execution order, so
/// the report is a pure function of the config.
inline AccuracyReport run_experiment(const ExperimentConfig& cfg) {
    if (auto err = validate_experiment(cfg)) throw *err;

    AccuracyReport report;
    report.batch_sizes = cfg.batch_sizes;
    report.strategies = cfg.strategies;
    report.seed = cfg.seed;
    report.distribution = cfg.distribution_label.empty()
                              ? dist_kind_name(cfg.fixtures.front().dist.kind)
                              : cfg.distribution_label;
    for (std::size_t i = 0; i < cfg.fixtures.size(); ++i) {
        if (i) report.fixture += "+";
        report.fixture += cfg.fixtures[i].name;
    }

    for (int batch : cfg.batch_sizes) {
        std::map<std::string, std::uint64_t> wins;
        for (const auto& s : cfg.strategies) wins[s] = 0;
        for (std::size_t f = 0; f < cfg.fixtures.size(); ++f) {
            const ExperimentFixture& fixture = cfg.fixtures[f];
            std::map<std::string, double> decisions;
            for (const auto& s : cfg.strategies) decisions[s] = fixture.setpoints.at(s);
            for (int t = 0; t < batch; ++t) {
                rng::Philox gen(cfg.seed, trial_stream(f, t));
                double truth = sample(fixture.dist, gen);
                ++wins[run_trial(decisions, truth, cfg.baseline)];
            }
        }
        double total = double(batch) * double(cfg.fixtures.size());
        for (const auto& s : cfg.strategies)
            report.win_fraction[batch][s] = double(wins[s]) / total;
    }
    return report;
}

/// Unweighted mean of win fractions across reports (the "all distributions"
/// view). Reports must agree on strategies and batch sizes.
inline AccuracyReport aggregate_reports(std::span<const AccuracyReport> reports) {
    if (reports.empty()) throw Error("evaluation", "ShapeMismatch", "no reports to aggregate");
    const AccuracyReport& first = reports.front();
    for (const auto& r : reports)
        if (r.batch_sizes != first.batch_sizes || r.strategies != first.strategies)
            throw Error("evaluation", "ShapeMismatch",
                        "reports differ in batch sizes or strategies");

    AccuracyReport out;
    out.batch_sizes = first.batch_sizes;
    out.strategies = first.strategies;
    out.seed = first.seed;
    out.fixture = first.fixture;
    bool same_dist = true, same_seed = true, same_fixture = true;
    for (const auto& r : reports) {
        same_dist = same_dist && r.distribution == first.distribution;
        same_seed = same_seed && r.seed == first.seed;
        same_fixture = same_fixture && r.fixture == first.fixture;
    }
    out.distribution = same_dist ? first.distribution : "all";
    if (!same_seed) out.seed = 0;
    if (!same_fixture) out.fixture = "multiple";

    for (int batch : out.batch_sizes)
        for (const auto& s : out.strategies) {
            double acc = 0;
            for (const auto& r : reports) acc += r.win_fraction.at(batch).at(s);
            out.win_fraction[batch][s] = acc / double(reports.size());
        }
    return out;
}

inline AccuracyReport aggregate_reports(const std::vector<AccuracyReport>& reports) {
    return aggregate_reports(std::span<const AccuracyReport>(reports.data(), reports.size()));
}

inline constexpr std::string_view kReportHeader =
    "distribution,batch_size,strategy,win_fraction,seed";

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline void write_report_csv(std::ostream& out, const AccuracyReport& r) {
    out << kReportHeader << "\n";
    for (int batch : r.batch_sizes)
        for (const auto& s : r.strategies)
            out << r.distribution << "," << batch << "," << s << ","
                << detail::format_double(r.win_fraction.at(batch).at(s)) << "," << r.seed << "\n";
}

inline AccuracyReport read_report_csv(std::istream& in, std::string_view origin = "<csv>") {
    std::string line;
    if (!std::getline(in, line) || (line != kReportHeader && line != std::string(kReportHeader) + "\r"))
        throw Error("evaluation", "MalformedFile",
                    std::string(origin) + ": missing report header");
    AccuracyReport r;
    std::set<int> batches;
    std::set<std::string> strategies;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_row(line);
        if (fields.size() != 5)
            throw Error("evaluation", "MalformedFile",
                        std::string(origin) + ":" + std::to_string(row) + ": expected 5 fields");
        int batch = std::stoi(fields[1]);
        r.distribution = fields[0];
        r.win_fraction[batch][fields[2]] = std::stod(fields[3]);
        r.seed = std::stoull(fields[4]);
        batches.insert(batch);
        strategies.insert(fields[2]);
    }
    r.batch_sizes.assign(batches.begin(), batches.end());
    r.strategies.assign(strategies.begin(), strategies.end());
    return r;
}

}  // namespace confres
