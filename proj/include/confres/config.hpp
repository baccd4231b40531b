#pragma once

// TOML-facing loaders for criteria templates and experiment configs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "confres/ahp.hpp"
#include "confres/csv.hpp"
#include "confres/detection.hpp"
#include "confres/errors.hpp"
#include "confres/evaluation.hpp"
#include "confres/prioritization.hpp"
#include "confres/profiles.hpp"
#include "confres/resolution.hpp"
#include "confres/toml.hpp"

namespace confres {

inline ConflictType parse_conflict_type(const std::string& name) {
    if (name == "temperature") return ConflictType::Temperature;
    if (name == "illumination") return ConflictType::Illumination;
    if (name == "audio") return ConflictType::Audio;
    if (name == "other") return ConflictType::Other;
    throw Error("config", "BadConflictType", "unknown conflict type '" + name + "'");
}

/// Matrix file shape: labels = [...], rows = [[...], ...] (row-major).
inline ahp::PairwiseMatrix matrix_from_toml(const toml::Value& v) {
    std::vector<std::string> labels;
    for (const toml::Value& l : v.at("labels").as_array()) labels.push_back(l.as_string());
    std::vector<std::vector<double>> rows;
    for (const toml::Value& row : v.at("rows").as_array()) rows.push_back(row.as_float_array());
    return ahp::PairwiseMatrix::from_rows(std::move(labels), rows);
}

/// [[template]] blocks keyed by conflict type override the built-ins.
inline TemplateOverrides load_templates_toml(const toml::Value& root) {
    TemplateOverrides out;
    if (const toml::Value* templates = root.find("template")) {
        for (const toml::Value& t : templates->as_array()) {
            ConflictType type = parse_conflict_type(t.at("type").as_string());
            out.emplace(type, matrix_from_toml(t));
        }
    }
    return out;
}

inline TemplateOverrides load_templates(const std::string& path) {
    return load_templates_toml(toml::load_file(path));
}

namespace detail {

inline std::string resolve_path(const std::string& base_dir, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

}  // namespace detail

/// Builds a ConflictCase from a [[fixture]] block.
inline ConflictCase fixture_conflict_from_toml(const toml::Value& f) {
    ConflictCase c;
    c.attribute = f.at("attribute").as_string();
    c.conflict_type = classify_attribute(c.attribute);
    c.service_id = f.get_string("service", "service");
    c.location = f.get_string("location", "room");
    const toml::Value* participants = f.find("participant");
    if (!participants)
        throw Error("config", "BadFixture", "fixture has no [[fixture.participant]] entries");
    for (const toml::Value& pj : participants->as_array()) {
        ConflictParticipant p;
        p.resident_id = pj.at("resident").as_string();
        p.preferred_value = pj.at("preference").as_float();
        p.event_start = parse_timestamp(pj.get_string("start", "2011-06-15T20:00:00"));
        p.event_end = parse_timestamp(pj.get_string("end", "2011-06-15T20:30:00"));
        c.participants.push_back(std::move(p));
    }
    Timestamp latest_start = c.participants.front().event_start;
    Timestamp earliest_end = c.participants.front().event_end;
    for (const auto& p : c.participants) {
        latest_start = std::max(latest_start, p.event_start);
        earliest_end = std::min(earliest_end, p.event_end);
    }
    c.overlap_start = latest_start;
    c.overlap_end = earliest_end;
    if (auto err = validate_conflict(c)) throw *err;
    return c;
}

/// Loads and fully resolves an experiment: explicit setpoints and
/// distribution parameters are taken as given; anything left out is computed
/// from the referenced profiles/history/templates files. All randomness
/// derives from the mandatory seed.
inline ExperimentConfig load_experiment_toml(const toml::Value& root,
                                             const std::string& base_dir = "") {
    ExperimentConfig cfg;
    if (!root.has("seed"))
        throw Error("config", "MissingSeed", "experiments sample ground truth; a seed is required");
    cfg.seed = std::uint64_t(root.at("seed").as_int());
    cfg.baseline = root.get_string("baseline", "average");
    if (const toml::Value* batches = root.find("batch_sizes")) {
        cfg.batch_sizes.clear();
        for (const toml::Value& b : batches->as_array()) cfg.batch_sizes.push_back(int(b.as_int()));
    }
    cfg.strategies.clear();
    if (const toml::Value* strategies = root.find("strategies")) {
        for (const toml::Value& s : strategies->as_array()) cfg.strategies.push_back(s.as_string());
    } else {
        cfg.strategies = {"adaptive", "average"};
    }

    const toml::Value& dist = root.at("distribution");
    DistKind kind = parse_dist_kind(dist.at("kind").as_string());
    cfg.distribution_label = dist_kind_name(kind);
    double sigma = dist.get_float("sigma", 1.0);

    // Lazily loaded derivation sources.
    ProfileMap profiles;
    TemplateOverrides overrides;
    ServiceEventLog history;
    bool sources_loaded = false;
    auto load_sources = [&]() {
        if (sources_loaded) return;
        if (!root.has("profiles"))
            throw Error("config", "MissingKey",
                        "computing setpoints or deriving distribution parameters needs "
                        "a 'profiles' path");
        profiles = load_profiles(detail::resolve_path(base_dir, root.at("profiles").as_string()));
        if (root.has("templates"))
            overrides = load_templates(detail::resolve_path(base_dir, root.at("templates").as_string()));
        if (root.has("history"))
            history = ServiceEventLog(
                csv::read_events_file(detail::resolve_path(base_dir, root.at("history").as_string())));
        sources_loaded = true;
    };

    std::vector<std::string> static_order;
    if (const toml::Value* order = root.find("static_order"))
        for (const toml::Value& id : order->as_array()) static_order.push_back(id.as_string());

    ahp::RandomIndexTable ri = ahp::RandomIndexTable::standard();
    const toml::Value* fixtures = root.find("fixture");
    if (!fixtures) throw Error("config", "BadExperiment", "no [[fixture]] blocks");
    for (const toml::Value& f : fixtures->as_array()) {
        ExperimentFixture fixture;
        fixture.name = f.get_string("name", "fixture" + std::to_string(cfg.fixtures.size() + 1));
        ConflictCase conflict = fixture_conflict_from_toml(f);

        const toml::Value* setpoints = f.find("setpoints");
        for (const std::string& strategy : cfg.strategies) {
            if (setpoints && setpoints->has(strategy)) {
                fixture.setpoints[strategy] = setpoints->at(strategy).as_float();
                continue;
            }
            // Proposed values are the strategies', unrounded: the simulation
            // measures the blend itself, not the actuation step.
            if (strategy == "adaptive") {
                load_sources();
                auto ranking = rank_residents(conflict, profiles, ri, &overrides);
                StrategyConfig sc;
                sc.rounding = Rounding::None;
                fixture.setpoints[strategy] = as_number(resolve_adaptive(conflict, ranking, sc).setpoint);
            } else if (strategy == "average") {
                fixture.setpoints[strategy] = as_number(resolve_average(conflict).setpoint);
            } else if (strategy == "use-first") {
                fixture.setpoints[strategy] = as_number(resolve_use_first(conflict).setpoint);
            } else if (strategy == "static") {
                if (static_order.empty())
                    throw Error("config", "MissingKey",
                                "strategy 'static' needs a static_order list");
                fixture.setpoints[strategy] =
                    as_number(resolve_static_priority(conflict, static_order).setpoint);
            } else {
                throw Error("config", "BadExperiment",
                            "no setpoint given for unknown strategy '" + strategy + "'");
            }
        }

        DistributionSpec spec;
        spec.kind = kind;
        spec.stddev = sigma;
        bool have_params = false;
        switch (kind) {
            case DistKind::Normal:
                if (dist.has("mean")) {
                    spec.mean = dist.at("mean").as_float();
                    have_params = true;
                }
                break;
            case DistKind::Uniform:
                if (dist.has("min") && dist.has("max")) {
                    spec.min = dist.at("min").as_float();
                    spec.max = dist.at("max").as_float();
                    have_params = true;
                }
                break;
            case DistKind::Triangular:
                if (dist.has("min") && dist.has("max") && dist.has("mode")) {
                    spec.min = dist.at("min").as_float();
                    spec.max = dist.at("max").as_float();
                    spec.mode = dist.at("mode").as_float();
                    have_params = true;
                }
                break;
        }
        if (!have_params) {
            if (kind == DistKind::Uniform) {
                // preference bounds need no history
                DerivedDistribution derived;
                derived.spec.kind = kind;
                double lo = as_number(conflict.participants.front().preferred_value);
                double hi = lo;
                for (const auto& p : conflict.participants) {
                    lo = std::min(lo, as_number(p.preferred_value));
                    hi = std::max(hi, as_number(p.preferred_value));
                }
                spec.min = lo;
                spec.max = hi;
            } else {
                load_sources();
                spec = derive_distribution_params(kind, conflict, history, profiles, ri, &overrides,
                                                  sigma)
                           .spec;
            }
        }
        if (auto err = validate_distribution(spec)) throw *err;
        fixture.dist = spec;
        cfg.fixtures.push_back(std::move(fixture));
    }

    if (auto err = validate_experiment(cfg)) throw *err;
    return cfg;
}

inline ExperimentConfig load_experiment(const std::string& path) {
    return load_experiment_toml(toml::load_file(path),
                                std::filesystem::path(path).parent_path().string());
}

}  // namespace confres
