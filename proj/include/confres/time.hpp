#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "confres/errors.hpp"

namespace confres {

/// Timezone-naive local timestamp with microsecond resolution, stored as
/// microseconds since 1970-01-01 00:00:00. Raw sensor logs carry naive local
/// time, so no zone conversion ever happens.
class Timestamp {
public:
    static constexpr std::int64_t kUsPerSecond = 1'000'000;
    static constexpr std::int64_t kUsPerDay = 86'400 * kUsPerSecond;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t micros) : micros_(micros) {}

    constexpr std::int64_t micros() const { return micros_; }
    constexpr double seconds() const { return double(micros_) / kUsPerSecond; }

    /// Calendar day index (days since 1970-01-01), for date-window filtering.
    constexpr std::int64_t day() const {
        std::int64_t d = micros_ / kUsPerDay;
        if (micros_ < 0 && micros_ % kUsPerDay != 0) --d;
        return d;
    }

    friend constexpr bool operator==(Timestamp a, Timestamp b) { return a.micros_ == b.micros_; }
    friend constexpr auto operator<=>(Timestamp a, Timestamp b) { return a.micros_ <=> b.micros_; }

private:
    std::int64_t micros_ = 0;
};

namespace detail {

// Days since 1970-01-01 for a Gregorian civil date (Hinnant's algorithm).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

inline bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value < 0) return false;
    out = value;
    return true;
}

}  // namespace detail

inline Timestamp make_timestamp(int year, int month, int day, int hour = 0, int minute = 0,
                                int second = 0, int microsecond = 0) {
    std::int64_t days = detail::days_from_civil(year, unsigned(month), unsigned(day));
    std::int64_t us = days * Timestamp::kUsPerDay;
    us += (std::int64_t(hour) * 3600 + std::int64_t(minute) * 60 + second) * Timestamp::kUsPerSecond;
    us += microsecond;
    return Timestamp(us);
}

/// Parses "YYYY-MM-DD". Returns the day index since 1970-01-01.
inline std::int64_t parse_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_uint(s.substr(0, 4), y) ||
        !detail::parse_uint(s.substr(5, 2), m) || !detail::parse_uint(s.substr(8, 2), d) ||
        m < 1 || m > 12 || d < 1 || d > 31) {
        throw Error("time", "BadTimestamp", "bad date '" + std::string(s) + "'");
    }
    return detail::days_from_civil(y, unsigned(m), unsigned(d));
}

/// Parses "HH:MM:SS" or "HH:MM:SS.ffffff". Returns microseconds past midnight.
inline std::int64_t parse_time_of_day(std::string_view s) {
    auto fail = [&]() -> Error { return Error("time", "BadTimestamp", "bad time '" + std::string(s) + "'"); };
    if (s.size() < 8 || s[2] != ':' || s[5] != ':') throw fail();
    int h = 0, m = 0, sec = 0;
    if (!detail::parse_uint(s.substr(0, 2), h) || !detail::parse_uint(s.substr(3, 2), m) ||
        !detail::parse_uint(s.substr(6, 2), sec) || h > 23 || m > 59 || sec > 60) {
        throw fail();
    }
    std::int64_t us = 0;
    if (s.size() > 8) {
        if (s[8] != '.' || s.size() == 9 || s.size() > 15) throw fail();
        std::string_view frac = s.substr(9);
        int value = 0;
        if (!detail::parse_uint(frac, value)) throw fail();
        us = value;
        for (std::size_t i = frac.size(); i < 6; ++i) us *= 10;
    }
    return (std::int64_t(h) * 3600 + std::int64_t(m) * 60 + sec) * Timestamp::kUsPerSecond + us;
}

/// Parses ISO-8601 "YYYY-MM-DDTHH:MM:SS[.ffffff]" (a space separator is also
/// accepted, matching raw log lines).
inline Timestamp parse_timestamp(std::string_view s) {
    if (s.size() < 19 || (s[10] != 'T' && s[10] != ' ')) {
        throw Error("time", "BadTimestamp", "bad timestamp '" + std::string(s) + "'");
    }
    std::int64_t days = parse_date(s.substr(0, 10));
    std::int64_t tod = parse_time_of_day(s.substr(11));
    return Timestamp(days * Timestamp::kUsPerDay + tod);
}

/// Canonical ISO-8601 rendering; fractional seconds only when nonzero.
inline std::string format_timestamp(Timestamp t) {
    std::int64_t day = t.day();
    std::int64_t rem = t.micros() - day * Timestamp::kUsPerDay;
    int y;
    unsigned mo, d;
    detail::civil_from_days(day, y, mo, d);
    std::int64_t sec = rem / Timestamp::kUsPerSecond;
    std::int64_t us = rem % Timestamp::kUsPerSecond;
    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", y, mo, d,
                          int(sec / 3600), int((sec / 60) % 60), int(sec % 60));
    std::string out(buf, std::size_t(n));
    if (us != 0) {
        std::snprintf(buf, sizeof buf, ".%06d", int(us));
        out += buf;
    }
    return out;
}

inline std::string format_date(std::int64_t day_index) {
    int y;
    unsigned mo, d;
    detail::civil_from_days(day_index, y, mo, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, mo, d);
    return buf;
}

}  // namespace confres
