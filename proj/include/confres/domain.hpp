#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "confres/errors.hpp"
#include "confres/time.hpp"

namespace confres {

/// Requested/observed value of a non-functional attribute. Numeric for
/// setpoint-style attributes (temperature, illumination), text otherwise
/// (e.g. a TV channel name).
using AttrValue = std::variant<double, std::string>;

inline bool is_numeric(const AttrValue& v) { return std::holds_alternative<double>(v); }

inline double as_number(const AttrValue& v) { return std::get<double>(v); }

/// Shortest round-trip rendering, so serialized values are byte-stable.
inline std::string format_attr_value(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
    return std::string(buf, ptr);
}

inline AttrValue parse_attr_value(const std::string& text) {
    if (!text.empty()) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec == std::errc{} && ptr == text.data() + text.size()) return d;
    }
    return text;
}

struct QAttribute {
    AttrValue value;
    std::string unit;
};

/// An IoT service: identity plus functional capabilities and non-functional
/// attributes. Declared in the sensor registry, referenced by events.
struct Service {
    std::string service_id;
    std::string service_name;
    std::set<std::string> functional_attrs;
    std::map<std::string, QAttribute> nonfunctional_attrs;
};

inline std::optional<Error> validate_service(const Service& s) {
    if (s.service_id.empty())
        return Error("domain", "MissingField", "service_id is empty");
    for (const auto& [name, q] : s.nonfunctional_attrs) {
        if (q.unit.empty())
            return Error("domain", "MissingField",
                         "attribute '" + name + "' of service '" + s.service_id + "' has no unit");
    }
    return std::nullopt;
}

/// One timed, located, user-attributed invocation of a service.
struct ServiceEvent {
    std::string service_id;
    std::string service_name;
    std::map<std::string, AttrValue> attr_snapshot;
    Timestamp start;
    Timestamp end;
    std::string location;
    std::string user;
    bool dangling = false;  // closed at stream end rather than by an OFF reading
};

inline std::optional<Error> validate_event(const ServiceEvent& e) {
    if (e.service_id.empty()) return Error("domain", "MissingField", "service_id is empty");
    if (e.location.empty()) return Error("domain", "MissingField", "location is empty");
    if (e.user.empty()) return Error("domain", "MissingField", "user is empty");
    if (!(e.start < e.end))
        return Error("domain", "InvalidInterval",
                     "event on '" + e.service_id + "' has start " + format_timestamp(e.start) +
                         " >= end " + format_timestamp(e.end));
    return std::nullopt;
}

/// Total, deterministic event order: start time, then service, user, end,
/// location. Rebuilding a log from shuffled input yields an identical log.
inline bool event_order(const ServiceEvent& a, const ServiceEvent& b) {
    auto key = [](const ServiceEvent& e) {
        return std::tie(e.start, e.service_id, e.user, e.end, e.location);
    };
    return key(a) < key(b);
}

/// Chronological record of service events.
class ServiceEventLog {
public:
    ServiceEventLog() = default;
    explicit ServiceEventLog(std::vector<ServiceEvent> events) : events_(std::move(events)) {
        std::sort(events_.begin(), events_.end(), event_order);
    }

    const std::vector<ServiceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    void add(ServiceEvent e) {
        auto pos = std::upper_bound(events_.begin(), events_.end(), e, event_order);
        events_.insert(pos, std::move(e));
    }

private:
    std::vector<ServiceEvent> events_;
};

/// Contextual factors driving prioritization. Severity scales are integer
/// 0..10 where 0 means absent.
struct ResidentProfile {
    std::string resident_id;
    int age = 0;
    int visual_impairment = 0;
    int hearing_impairment = 0;
    int illness = 0;
};

inline constexpr int kSeverityMax = 10;

inline std::optional<Error> validate_profile(const ResidentProfile& p) {
    if (p.resident_id.empty()) return Error("domain", "MissingField", "resident_id is empty");
    if (p.age < 0) return Error("domain", "OutOfRange", "age < 0 for " + p.resident_id);
    for (int v : {p.visual_impairment, p.hearing_impairment, p.illness}) {
        if (v < 0 || v > kSeverityMax)
            return Error("domain", "OutOfRange",
                         "severity outside [0," + std::to_string(kSeverityMax) + "] for " + p.resident_id);
    }
    return std::nullopt;
}

enum class ConflictType { Temperature, Illumination, Audio, Other };

inline std::string conflict_type_name(ConflictType t) {
    switch (t) {
        case ConflictType::Temperature: return "temperature";
        case ConflictType::Illumination: return "illumination";
        case ConflictType::Audio: return "audio";
        case ConflictType::Other: return "other";
    }
    return "other";
}

struct ConflictParticipant {
    std::string resident_id;
    AttrValue preferred_value;
    Timestamp event_start;  // needed by the use-first strategy
    Timestamp event_end;
};

/// A detected conflict: co-located, overlapping, divergent requirements on
/// one service attribute from at least two residents.
struct ConflictCase {
    ConflictType conflict_type = ConflictType::Other;
    std::string attribute;  // conflicted non-functional attribute name
    std::string service_id;
    Timestamp overlap_start;
    Timestamp overlap_end;
    std::vector<ConflictParticipant> participants;
    std::string location;
};

inline std::optional<Error> validate_conflict(const ConflictCase& c) {
    if (c.participants.size() < 2)
        return Error("domain", "InvalidConflict", "fewer than 2 participants");
    if (!(c.overlap_start < c.overlap_end))
        return Error("domain", "InvalidInterval", "empty overlap interval");
    std::set<std::string> residents;
    for (const auto& p : c.participants) residents.insert(p.resident_id);
    if (residents.size() != c.participants.size())
        return Error("domain", "InvalidConflict", "duplicate resident among participants");
    bool differs = false;
    for (std::size_t i = 1; i < c.participants.size(); ++i)
        differs = differs || !(c.participants[i].preferred_value == c.participants[0].preferred_value);
    if (!differs)
        return Error("domain", "InvalidConflict", "all preferred values identical");
    return std::nullopt;
}

enum class Strategy { Adaptive, Average, UseFirst, StaticPriority };

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Adaptive: return "adaptive";
        case Strategy::Average: return "average";
        case Strategy::UseFirst: return "use-first";
        case Strategy::StaticPriority: return "static";
    }
    return "adaptive";
}

struct ResidentWeight {
    std::string resident_id;
    double raw_weight = 0;
    double normalized_weight = 0;
    int rank = 0;  // 1-based
};

}  // namespace confres
