#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/registry.hpp"
#include "confres/time.hpp"

namespace confres {

/// One raw log line: DATE TIME SENSOR VALUE. The value is either a status
/// token (ON/OFF, OPEN/CLOSE) or a numeric reading.
struct SensorReading {
    std::int64_t day = 0;      // days since 1970-01-01
    std::int64_t time_us = 0;  // microseconds past midnight
    std::string sensor_id;
    std::string value;

    Timestamp timestamp() const { return Timestamp(day * Timestamp::kUsPerDay + time_us); }
};

/// All readings from one source home; each home contributes one synthetic
/// resident to the merged log.
struct HomeStream {
    std::string home_label;
    std::string resident_id;
    std::vector<SensorReading> readings;  // sorted by (day, time)
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

}  // namespace detail

/// Parses one whitespace-separated record; tokens past the fourth are
/// activity annotations and are discarded.
inline SensorReading parse_casas_line(std::string_view line) {
    auto tokens = detail::split_ws(line);
    if (tokens.size() < 4)
        throw Error("ingest", "MalformedLine",
                    "expected DATE TIME SENSOR VALUE, got '" + std::string(line) + "'");
    SensorReading r;
    r.day = parse_date(tokens[0]);
    r.time_us = parse_time_of_day(tokens[1]);
    r.sensor_id = std::string(tokens[2]);
    r.value = std::string(tokens[3]);
    if (r.sensor_id.empty() || r.value.empty())
        throw Error("ingest", "MalformedLine", "empty sensor or value token");
    return r;
}

/// Inverse of parse_casas_line for well-formed readings.
inline std::string format_casas_line(const SensorReading& r) {
    std::string time = format_timestamp(r.timestamp());
    time[10] = ' ';
    return time + " " + r.sensor_id + " " + r.value;
}

inline HomeStream load_home_stream(const std::string& path, std::string home_label,
                                   std::string resident_id) {
    std::ifstream in(path);
    if (!in) throw Error("ingest", "FileNotFound", "cannot open '" + path + "'");
    HomeStream stream;
    stream.home_label = std::move(home_label);
    stream.resident_id = std::move(resident_id);
    std::string line;
    while (std::getline(in, line)) {
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (blank) continue;
        stream.readings.push_back(parse_casas_line(line));
    }
    std::stable_sort(stream.readings.begin(), stream.readings.end(),
                     [](const SensorReading& a, const SensorReading& b) {
                         return std::tie(a.day, a.time_us) < std::tie(b.day, b.time_us);
                     });
    return stream;
}

struct IngestStats {
    std::size_t events = 0;
    std::size_t dangling_on = 0;    // ON never closed; event closed at stream end
    std::size_t unmatched_off = 0;  // OFF with no open ON; reading skipped
    std::size_t duplicate_on = 0;   // ON while already open; reading skipped
    std::size_t unregistered = 0;   // sensor without a registry rule
    std::size_t ignored_values = 0; // numeric reading outside any event, or
                                    // unparseable payload
};

inline constexpr std::int64_t kDefaultSettleWindowUs = 60 * Timestamp::kUsPerSecond;

namespace detail {

struct ValueSample {
    Timestamp at;
    double value;
};

// Keeps only the last reading of any burst: a sample superseded within the
// window is the user still adjusting, not a settled preference.
inline std::vector<ValueSample> settle_values(const std::vector<ValueSample>& samples,
                                              std::int64_t window_us) {
    std::vector<ValueSample> kept;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() &&
            samples[i + 1].at.micros() - samples[i].at.micros() <= window_us)
            continue;
        kept.push_back(samples[i]);
    }
    return kept;
}

inline bool is_on_token(std::string_view v) { return v == "ON" || v == "OPEN"; }
inline bool is_off_token(std::string_view v) { return v == "OFF" || v == "CLOSE"; }

inline bool parse_number(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Pairs ON..OFF readings into service events and fills attribute snapshots
/// from numeric readings of the same service and location that fall inside
/// each event's interval.
inline std::vector<ServiceEvent> build_service_events(
    const HomeStream& stream, const SensorRegistry& registry, IngestStats* stats = nullptr,
    std::int64_t settle_window_us = kDefaultSettleWindowUs) {
    IngestStats local;
    IngestStats& st = stats ? *stats : local;

    struct OpenEvent {
        Timestamp start;
        const SensorRule* rule;
    };
    std::map<std::string, OpenEvent> open;  // keyed by sensor id

    using AttrKey = std::tuple<std::string, std::string, std::string>;  // service, location, attr
    std::map<AttrKey, std::vector<detail::ValueSample>> samples;

    std::vector<ServiceEvent> events;
    Timestamp stream_end;

    auto close_event = [&](const std::string& sensor_id, const OpenEvent& oe, Timestamp end,
                           bool dangling) {
        if (!(oe.start < end)) return false;
        ServiceEvent e;
        e.service_id = oe.rule->service_id;
        e.service_name = registry.service_name(oe.rule->service_id);
        e.start = oe.start;
        e.end = end;
        e.location = oe.rule->location;
        e.user = stream.resident_id;
        e.dangling = dangling;
        events.push_back(std::move(e));
        (void)sensor_id;
        return true;
    };

    for (const SensorReading& r : stream.readings) {
        Timestamp now = r.timestamp();
        if (stream_end < now) stream_end = now;
        const SensorRule* rule = registry.match(r.sensor_id);
        if (!rule) {
            ++st.unregistered;
            continue;
        }
        if (detail::is_on_token(r.value)) {
            auto [it, inserted] = open.emplace(r.sensor_id, OpenEvent{now, rule});
            if (!inserted) ++st.duplicate_on;
        } else if (detail::is_off_token(r.value)) {
            auto it = open.find(r.sensor_id);
            if (it == open.end()) {
                ++st.unmatched_off;
            } else {
                close_event(r.sensor_id, it->second, now, false);
                open.erase(it);
            }
        } else {
            double value = 0;
            if (rule->attribute.empty() || !detail::parse_number(r.value, value)) {
                ++st.ignored_values;
            } else {
                samples[{rule->service_id, rule->location, rule->attribute}].push_back(
                    {now, value});
            }
        }
    }

    for (const auto& [sensor_id, oe] : open) {
        if (close_event(sensor_id, oe, stream_end, true)) ++st.dangling_on;
    }

    // Attach settled attribute values to each enclosing event.
    for (ServiceEvent& e : events) {
        for (const auto& [key, series] : samples) {
            const auto& [service_id, location, attribute] = key;
            if (service_id != e.service_id || location != e.location) continue;
            std::vector<detail::ValueSample> inside;
            for (const auto& s : series)
                if (e.start <= s.at && s.at <= e.end) inside.push_back(s);
            auto settled = detail::settle_values(inside, settle_window_us);
            if (!settled.empty()) e.attr_snapshot[attribute] = settled.back().value;
        }
    }

    std::sort(events.begin(), events.end(), event_order);
    st.events += events.size();
    return events;
}

struct DateRange {
    std::int64_t from_day = 0;
    std::int64_t to_day = 0;  // inclusive
};

/// The evaluation window used throughout: 2011-06-15 .. 2011-08-14.
inline DateRange default_merge_window() {
    return {parse_date("2011-06-15"), parse_date("2011-08-14")};
}

/// Merges several single-resident homes into one multi-resident log: events
/// are filtered to the window, tagged with their home's resident, mapped
/// onto shared service ids by the registry, and globally sorted.
inline ServiceEventLog merge_homes(const std::vector<HomeStream>& streams, DateRange window,
                                   const SensorRegistry& registry, IngestStats* stats = nullptr,
                                   std::int64_t settle_window_us = kDefaultSettleWindowUs) {
    if (streams.empty()) throw Error("ingest", "EmptyIntersection", "no home streams given");

    std::int64_t common_from = std::numeric_limits<std::int64_t>::min();
    std::int64_t common_to = std::numeric_limits<std::int64_t>::max();
    for (const HomeStream& s : streams) {
        if (s.readings.empty())
            throw Error("ingest", "EmptyIntersection",
                        "home '" + s.home_label + "' has no readings");
        common_from = std::max(common_from, s.readings.front().day);
        common_to = std::min(common_to, s.readings.back().day);
    }
    if (common_from > common_to)
        throw Error("ingest", "EmptyIntersection", "home streams share no common dates");

    std::vector<ServiceEvent> merged;
    for (const HomeStream& s : streams) {
        auto events = build_service_events(s, registry, stats, settle_window_us);
        for (ServiceEvent& e : events) {
            std::int64_t day = e.start.day();
            if (day < window.from_day || day > window.to_day) continue;
            merged.push_back(std::move(e));
        }
    }
    return ServiceEventLog(std::move(merged));
}

}  // namespace confres
