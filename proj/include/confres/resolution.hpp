#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/prioritization.hpp"

namespace confres {

enum class Rounding { DirectionalTowardTopRank, Nearest, None };

struct StrategyConfig {
    Rounding rounding = Rounding::DirectionalTowardTopRank;
    double granularity = 1.0;  // per-attribute rounding step, from the registry
    std::vector<std::string> static_order;
};

/// Outcome of resolving one conflict under one strategy.
struct ResolutionDecision {
    Strategy strategy = Strategy::Adaptive;
    AttrValue setpoint;
    std::vector<ResidentWeight> ranking;  // empty for strategies that ignore weights
    std::optional<RankingDiagnostics> diagnostics;
};

namespace detail {

inline std::vector<double> numeric_preferences(const ConflictCase& c, const char* strategy) {
    std::vector<double> prefs;
    prefs.reserve(c.participants.size());
    for (const auto& p : c.participants) {
        if (!is_numeric(p.preferred_value))
            throw Error("resolution", "NonNumericAttribute",
                        std::string(strategy) + " cannot blend non-numeric '" + c.attribute +
                            "' values");
        prefs.push_back(as_number(p.preferred_value));
    }
    return prefs;
}

}  // namespace detail

/// Priority-weighted blend: raw = sum(weight_i * preference_i), rounded per
/// config and clamped into the participants' preference range. Directional
/// rounding snaps raw to the next granularity step toward the top-ranked
/// resident's preference, never further than one step from raw.
inline ResolutionDecision resolve_adaptive(const ConflictCase& c,
                                           const std::vector<ResidentWeight>& ranking,
                                           const StrategyConfig& cfg = {}) {
    std::vector<double> prefs = detail::numeric_preferences(c, "adaptive");

    std::map<std::string, double> weight_of;
    const ResidentWeight* top = nullptr;
    for (const auto& rw : ranking) {
        weight_of[rw.resident_id] = rw.normalized_weight;
        if (!top || rw.rank < top->rank) top = &rw;
    }
    if (weight_of.size() != c.participants.size())
        throw Error("resolution", "RankingMismatch",
                    "ranking does not cover the case participants exactly");

    double raw = 0;
    double top_pref = 0;
    double lo = prefs.front(), hi = prefs.front();
    for (std::size_t i = 0; i < c.participants.size(); ++i) {
        auto it = weight_of.find(c.participants[i].resident_id);
        if (it == weight_of.end())
            throw Error("resolution", "RankingMismatch",
                        "participant '" + c.participants[i].resident_id + "' missing from ranking");
        raw += it->second * prefs[i];
        lo = std::min(lo, prefs[i]);
        hi = std::max(hi, prefs[i]);
        if (top && c.participants[i].resident_id == top->resident_id) top_pref = prefs[i];
    }

    double g = cfg.granularity > 0 ? cfg.granularity : 1.0;
    double value = raw;
    switch (cfg.rounding) {
        case Rounding::DirectionalTowardTopRank:
            if (top_pref > raw)
                value = std::ceil(raw / g) * g;
            else if (top_pref < raw)
                value = std::floor(raw / g) * g;
            break;
        case Rounding::Nearest:
            value = std::round(raw / g) * g;
            break;
        case Rounding::None:
            break;
    }
    value = std::clamp(value, lo, hi);

    ResolutionDecision d;
    d.strategy = Strategy::Adaptive;
    d.setpoint = value;
    d.ranking = ranking;
    return d;
}

/// Fair-principle baseline: arithmetic mean of the preferences, unrounded.
inline ResolutionDecision resolve_average(const ConflictCase& c) {
    std::vector<double> prefs = detail::numeric_preferences(c, "average");
    double sum = 0;
    for (double p : prefs) sum += p;
    ResolutionDecision d;
    d.strategy = Strategy::Average;
    d.setpoint = sum / double(prefs.size());
    return d;
}

/// Whoever started first wins; ties break by resident id. Copies the
/// winner's preference verbatim, so non-numeric attributes are fine.
inline ResolutionDecision resolve_use_first(const ConflictCase& c) {
    const ConflictParticipant* first = &c.participants.front();
    for (const auto& p : c.participants) {
        if (std::tie(p.event_start, p.resident_id) <
            std::tie(first->event_start, first->resident_id))
            first = &p;
    }
    ResolutionDecision d;
    d.strategy = Strategy::UseFirst;
    d.setpoint = first->preferred_value;
    return d;
}

/// Fixed household pecking order; earlier in the order wins.
inline ResolutionDecision resolve_static_priority(const ConflictCase& c,
                                                  const std::vector<std::string>& order) {
    auto position = [&](const std::string& id) {
        auto it = std::find(order.begin(), order.end(), id);
        return it == order.end() ? order.size() : std::size_t(it - order.begin());
    };
    const ConflictParticipant* best = nullptr;
    for (const auto& p : c.participants) {
        if (position(p.resident_id) == order.size())
            throw Error("resolution", "UnrankedParticipant",
                        "participant '" + p.resident_id + "' is not in the static order");
        if (!best || position(p.resident_id) < position(best->resident_id)) best = &p;
    }
    ResolutionDecision d;
    d.strategy = Strategy::StaticPriority;
    d.setpoint = best->preferred_value;
    return d;
}

}  // namespace confres
