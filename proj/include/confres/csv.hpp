#pragma once

// Normalized event CSV: the interchange format every pipeline stage reads
// and writes. Columns, in order:
//   start,end,service_id,service_name,location,user,attribute,value
// ISO-8601 timestamps, mandatory header row, UTF-8. Events with several
// attributes span one row per attribute; events with none take a single row
// with empty attribute and value.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/time.hpp"

namespace confres::csv {

inline constexpr std::string_view kEventHeader =
    "start,end,service_id,service_name,location,user,attribute,value";

inline std::string escape_field(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

inline void write_events(std::ostream& out, const std::vector<ServiceEvent>& events) {
    out << kEventHeader << "\n";
    for (const ServiceEvent& e : events) {
        std::string prefix = format_timestamp(e.start) + "," + format_timestamp(e.end) + "," +
                             escape_field(e.service_id) + "," + escape_field(e.service_name) +
                             "," + escape_field(e.location) + "," + escape_field(e.user) + ",";
        if (e.attr_snapshot.empty()) {
            out << prefix << ",\n";
        } else {
            for (const auto& [name, value] : e.attr_snapshot)
                out << prefix << escape_field(name) << ","
                    << escape_field(format_attr_value(value)) << "\n";
        }
    }
}

inline std::vector<ServiceEvent> read_events(std::istream& in, std::string_view origin = "<csv>") {
    std::string line;
    if (!std::getline(in, line))
        throw Error("csv", "MalformedFile", std::string(origin) + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kEventHeader)
        throw Error("csv", "MalformedFile",
                    std::string(origin) + ": bad header '" + line + "'");

    // Rows sharing the event identity merge back into one multi-attribute event.
    using Key = std::tuple<std::int64_t, std::int64_t, std::string, std::string, std::string>;
    std::map<Key, std::size_t> index;
    std::vector<ServiceEvent> events;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_row(line);
        if (fields.size() != 8)
            throw Error("csv", "MalformedRow",
                        std::string(origin) + ":" + std::to_string(row) + ": expected 8 fields, got " +
                            std::to_string(fields.size()));
        ServiceEvent e;
        e.start = parse_timestamp(fields[0]);
        e.end = parse_timestamp(fields[1]);
        e.service_id = fields[2];
        e.service_name = fields[3];
        e.location = fields[4];
        e.user = fields[5];
        if (auto err = validate_event(e))
            throw Error("csv", "MalformedRow",
                        std::string(origin) + ":" + std::to_string(row) + ": " + err->what());

        Key key{e.start.micros(), e.end.micros(), e.service_id, e.location, e.user};
        auto [it, inserted] = index.emplace(key, events.size());
        if (inserted) events.push_back(std::move(e));
        if (!fields[6].empty())
            events[it->second].attr_snapshot[fields[6]] = parse_attr_value(fields[7]);
    }
    return events;
}

inline void write_events_file(const std::string& path, const std::vector<ServiceEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("csv", "FileNotFound", "cannot open '" + path + "' for writing");
    write_events(out, events);
}

inline std::vector<ServiceEvent> read_events_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("csv", "FileNotFound", "cannot open '" + path + "'");
    return read_events(in, path);
}

}  // namespace confres::csv
