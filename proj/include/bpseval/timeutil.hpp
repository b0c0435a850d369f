#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bpseval {

/// UTC instant at second precision.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

/// Parses `YYYY-MM-DD[T ]hh:mm:ss[.fraction][Z|+hh:mm|-hh:mm|+hhmm]`.
/// Fractional seconds are truncated; a missing offset means UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Formats as `YYYY-MM-DDThh:mm:ssZ`.
std::string format_iso8601(Timestamp t);

inline std::int64_t to_epoch_seconds(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_epoch_seconds(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

inline double minutes_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 60.0;
}

inline double hours_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 3600.0;
}

/// Day of week with Monday = 0 ... Sunday = 6.
int weekday_of(Timestamp t);

/// Hour of day 0..23 (UTC).
int hour_of_day(Timestamp t);

/// Seconds elapsed since Monday 00:00 of the containing week.
std::int64_t seconds_into_week(Timestamp t);

}  // namespace bpseval
