#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/profiles.hpp"
#include "confres/time.hpp"

namespace confres {

struct TimeInterval {
    Timestamp start;
    Timestamp end;
};

/// Intersection of two half-open intervals [start, end). Intervals that only
/// touch at an endpoint do not overlap.
inline std::optional<TimeInterval> temporal_overlap(TimeInterval a, TimeInterval b) {
    Timestamp start = std::max(a.start, b.start);
    Timestamp end = std::min(a.end, b.end);
    if (start < end) return TimeInterval{start, end};
    return std::nullopt;
}

/// A maximal set of pairwise-overlapping events on one service at one
/// location. All members share a common instant, so shared_interval is
/// never empty.
struct OverlapGroup {
    std::string service_id;
    std::string location;
    std::vector<ServiceEvent> events;
    TimeInterval shared_interval;
};

inline ConflictType classify_attribute(std::string_view attribute) {
    std::string lower(attribute);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (lower == "temperature") return ConflictType::Temperature;
    if (lower == "illumination") return ConflictType::Illumination;
    if (lower == "volume") return ConflictType::Audio;
    return ConflictType::Other;
}

inline ConflictType classify_conflict(const ConflictCase& c) {
    return classify_attribute(c.attribute);
}

/// Maximal overlap groups per (service, location), via an endpoint sweep.
/// A group is emitted each time an interval ends after at least one new
/// interval joined the active set; that enumerates every maximal clique of
/// the interval graph exactly once.
inline std::vector<OverlapGroup> overlap_groups(const ServiceEventLog& log) {
    std::map<std::pair<std::string, std::string>, std::vector<const ServiceEvent*>> partitions;
    for (const ServiceEvent& e : log.events())
        partitions[{e.service_id, e.location}].push_back(&e);

    std::vector<OverlapGroup> groups;
    for (const auto& [key, events] : partitions) {
        struct Endpoint {
            Timestamp at;
            bool is_end;
            std::size_t index;
        };
        std::vector<Endpoint> endpoints;
        endpoints.reserve(events.size() * 2);
        for (std::size_t i = 0; i < events.size(); ++i) {
            endpoints.push_back({events[i]->start, false, i});
            endpoints.push_back({events[i]->end, true, i});
        }
        // ends sort before starts at the same instant: [a,t) and [t,b) are disjoint
        std::sort(endpoints.begin(), endpoints.end(), [](const Endpoint& a, const Endpoint& b) {
            return std::tie(a.at, b.is_end, a.index) < std::tie(b.at, a.is_end, b.index);
        });

        std::set<std::size_t> active;
        bool grew_since_emit = false;
        for (const Endpoint& ep : endpoints) {
            if (!ep.is_end) {
                active.insert(ep.index);
                grew_since_emit = true;
                continue;
            }
            if (grew_since_emit && active.size() >= 2) {
                OverlapGroup g;
                g.service_id = key.first;
                g.location = key.second;
                Timestamp latest_start = events[*active.begin()]->start;
                Timestamp earliest_end = events[*active.begin()]->end;
                for (std::size_t idx : active) {
                    g.events.push_back(*events[idx]);
                    latest_start = std::max(latest_start, events[idx]->start);
                    earliest_end = std::min(earliest_end, events[idx]->end);
                }
                std::sort(g.events.begin(), g.events.end(), event_order);
                g.shared_interval = {latest_start, earliest_end};
                groups.push_back(std::move(g));
                grew_since_emit = false;
            }
            active.erase(ep.index);
        }
    }

    std::sort(groups.begin(), groups.end(), [](const OverlapGroup& a, const OverlapGroup& b) {
        return std::tie(a.shared_interval.start, a.service_id, a.location) <
               std::tie(b.shared_interval.start, b.service_id, b.location);
    });
    return groups;
}

/// Applies the conflict conditions to each maximal overlap group: distinct
/// users, and for each attribute at least two divergent requested values.
/// One case is emitted per conflicted attribute. When a user has several
/// events in a group, their most recent request stands.
inline std::vector<ConflictCase> detect_conflicts(const ServiceEventLog& log,
                                                  const ProfileMap& profiles) {
    for (const ServiceEvent& e : log.events())
        if (!profiles.count(e.user))
            throw Error("detection", "UnknownResident",
                        "event user '" + e.user + "' has no resident profile");

    std::vector<ConflictCase> cases;
    for (const OverlapGroup& group : overlap_groups(log)) {
        // latest request per user wins within a group
        std::map<std::string, const ServiceEvent*> per_user;
        for (const ServiceEvent& e : group.events) {
            auto [it, inserted] = per_user.emplace(e.user, &e);
            if (!inserted) {
                const ServiceEvent* prev = it->second;
                if (std::tie(prev->start, prev->end) < std::tie(e.start, e.end)) it->second = &e;
            }
        }
        if (per_user.size() < 2) continue;

        std::set<std::string> attributes;
        for (const auto& [user, event] : per_user)
            for (const auto& [name, value] : event->attr_snapshot) attributes.insert(name);

        for (const std::string& attribute : attributes) {
            ConflictCase c;
            c.attribute = attribute;
            c.conflict_type = classify_attribute(attribute);
            c.service_id = group.service_id;
            c.location = group.location;
            bool divergent = false;
            for (const auto& [user, event] : per_user) {
                auto it = event->attr_snapshot.find(attribute);
                if (it == event->attr_snapshot.end()) continue;
                c.participants.push_back({user, it->second, event->start, event->end});
                if (!(it->second == c.participants.front().preferred_value)) divergent = true;
            }
            if (c.participants.size() < 2 || !divergent) continue;
            Timestamp latest_start = c.participants.front().event_start;
            Timestamp earliest_end = c.participants.front().event_end;
            for (const auto& p : c.participants) {
                latest_start = std::max(latest_start, p.event_start);
                earliest_end = std::min(earliest_end, p.event_end);
            }
            c.overlap_start = latest_start;
            c.overlap_end = earliest_end;
            cases.push_back(std::move(c));
        }
    }

    std::sort(cases.begin(), cases.end(), [](const ConflictCase& a, const ConflictCase& b) {
        return std::tie(a.overlap_start, a.service_id, a.location, a.attribute) <
               std::tie(b.overlap_start, b.service_id, b.location, b.attribute);
    });
    return cases;
}

}  // namespace confres
