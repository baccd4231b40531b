#pragma once

// JSON shapes for the pipeline artifacts: conflicts.json, decisions.json,
// rankings, and simulation reports.

#include <string>
#include <vector>

#include <json.hpp>

#include "confres/detection.hpp"
#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/evaluation.hpp"
#include "confres/fileio.hpp"
#include "confres/prioritization.hpp"
#include "confres/resolution.hpp"

namespace confres::jsonio {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline ordered_json attr_value_to_json(const AttrValue& v) {
    if (is_numeric(v)) return as_number(v);
    return std::get<std::string>(v);
}

inline AttrValue attr_value_from_json(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    return j.get<std::string>();
}

inline ordered_json conflict_to_json(const ConflictCase& c) {
    ordered_json participants = ordered_json::array();
    for (const auto& p : c.participants) {
        participants.push_back({{"resident_id", p.resident_id},
                                {"preferred_value", attr_value_to_json(p.preferred_value)},
                                {"event_start", format_timestamp(p.event_start)},
                                {"event_end", format_timestamp(p.event_end)}});
    }
    return {{"conflict_type", conflict_type_name(c.conflict_type)},
            {"attribute", c.attribute},
            {"service_id", c.service_id},
            {"location", c.location},
            {"overlap_start", format_timestamp(c.overlap_start)},
            {"overlap_end", format_timestamp(c.overlap_end)},
            {"participants", participants}};
}

inline ConflictCase conflict_from_json(const ordered_json& j) {
    ConflictCase c;
    c.attribute = j.at("attribute").get<std::string>();
    c.conflict_type = classify_attribute(c.attribute);
    c.service_id = j.at("service_id").get<std::string>();
    c.location = j.at("location").get<std::string>();
    c.overlap_start = parse_timestamp(j.at("overlap_start").get<std::string>());
    c.overlap_end = parse_timestamp(j.at("overlap_end").get<std::string>());
    for (const auto& pj : j.at("participants")) {
        ConflictParticipant p;
        p.resident_id = pj.at("resident_id").get<std::string>();
        p.preferred_value = attr_value_from_json(pj.at("preferred_value"));
        p.event_start = parse_timestamp(pj.at("event_start").get<std::string>());
        p.event_end = parse_timestamp(pj.at("event_end").get<std::string>());
        c.participants.push_back(std::move(p));
    }
    if (auto err = validate_conflict(c)) throw *err;
    return c;
}

inline std::string conflicts_to_string(const std::vector<ConflictCase>& cases) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : cases) arr.push_back(conflict_to_json(c));
    return arr.dump(2) + "\n";
}

inline std::vector<ConflictCase> conflicts_from_string(const std::string& text) {
    ordered_json arr = ordered_json::parse(text);
    if (!arr.is_array()) throw Error("json", "MalformedFile", "expected a JSON array of conflicts");
    std::vector<ConflictCase> out;
    for (const auto& j : arr) out.push_back(conflict_from_json(j));
    return out;
}

inline std::vector<ConflictCase> read_conflicts_file(const std::string& path) {
    return conflicts_from_string(read_file(path));
}

inline ordered_json prioritization_to_json(const ahp::PrioritizationResult& r) {
    return {{"labels", r.labels},
            {"gm_vector", r.gm_vector},
            {"weights", r.weights},
            {"weighted_sum", r.weighted_sum},
            {"consistency_vector", r.consistency_vector},
            {"lambda_max", r.lambda_max},
            {"ci", r.ci},
            {"cr", r.cr}};
}

inline ordered_json ranking_to_json(const std::vector<ResidentWeight>& ranking) {
    ordered_json arr = ordered_json::array();
    for (const auto& rw : ranking)
        arr.push_back({{"resident_id", rw.resident_id},
                       {"raw_weight", rw.raw_weight},
                       {"normalized_weight", rw.normalized_weight},
                       {"rank", rw.rank}});
    return arr;
}

inline ordered_json diagnostics_to_json(const RankingDiagnostics& diag) {
    ordered_json alternatives = ordered_json::object();
    for (const auto& [criterion, result] : diag.alternatives)
        alternatives[criterion_name(criterion)] = prioritization_to_json(result);
    return {{"criteria", prioritization_to_json(diag.criteria)},
            {"alternatives", alternatives}};
}

inline ordered_json decision_to_json(const ConflictCase& c, const ResolutionDecision& d) {
    ordered_json j = {{"conflict", conflict_to_json(c)},
                      {"strategy", strategy_name(d.strategy)},
                      {"setpoint", attr_value_to_json(d.setpoint)}};
    if (!d.ranking.empty()) j["ranking"] = ranking_to_json(d.ranking);
    if (d.diagnostics) j["diagnostics"] = diagnostics_to_json(*d.diagnostics);
    return j;
}

inline ordered_json report_to_json(const AccuracyReport& r) {
    ordered_json rows = ordered_json::array();
    for (int batch : r.batch_sizes)
        for (const auto& s : r.strategies)
            rows.push_back({{"distribution", r.distribution},
                            {"batch_size", batch},
                            {"strategy", s},
                            {"win_fraction", r.win_fraction.at(batch).at(s)},
                            {"seed", r.seed}});
    return rows;
}

}  // namespace confres::jsonio
