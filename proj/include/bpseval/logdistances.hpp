#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bpseval/eventlog.hpp"
#include "bpseval/wasserstein.hpp"

namespace bpseval {

enum class ProxyKind { AbsEvent, CaseArrival, RelEvent, CycleTime };
enum class DistanceKind { Aedd, Cadd, Redd, Ctdd };
enum class DistanceMode { TimestampSamples, HourlyCounts };
enum class ReferenceKind { Test, Train };

std::string_view to_string(DistanceMode mode);
std::string_view to_string(ReferenceKind kind);
DistanceMode parse_distance_mode(std::string_view text);
ReferenceKind parse_reference_kind(std::string_view text);

/// Hour-valued observations derived from a log, relative to `origin`.
struct HourSeries {
  Timestamp origin;
  std::vector<double> values;
};

/// Per-hour observation counts, one entry per consecutive hour bin.
struct CountSequence {
  Timestamp origin;
  std::vector<double> counts;
};

struct DistanceReport {
  double ngd = 0.0;
  double aedd = 0.0;
  double cadd = 0.0;
  double cedd = 0.0;
  double redd = 0.0;
  double ctdd = 0.0;
  DistanceMode mode = DistanceMode::TimestampSamples;
  ReferenceKind reference_kind = ReferenceKind::Test;

  friend bool operator==(const DistanceReport&, const DistanceReport&) = default;
};

/// ABS_EVENT: hour index of every start and every end. CASE_ARRIVAL: hour index of
/// each arrival. REL_EVENT: floored hours from case arrival to each event start.
/// CYCLE_TIME: fractional hours per trace.
HourSeries extract_proxy(const EventLog& log, ProxyKind kind, Timestamp origin);

/// counts[b] = multiplicity of hour index b for b in [0, horizon_hours).
CountSequence to_count_sequence(const HourSeries& series, int horizon_hours);

/// Padded n-gram frequency distance in [0, 1].
double ngd(const EventLog& sim, const EventLog& ref, int n = 3);

double distribution_distance(const EventLog& sim, const EventLog& ref, DistanceKind kind,
                             DistanceMode mode = DistanceMode::TimestampSamples);

/// Circadian distance: per weekday W1 of start hour-of-day, averaged over weekdays seen
/// in either log; weekdays seen in only one log cost kCeddPenalty.
double cedd(const EventLog& sim, const EventLog& ref);

inline constexpr double kCeddPenalty = 24.0;

DistanceReport standard_practice_report(const EventLog& sim, const EventLog& ref,
                                        DistanceMode mode = DistanceMode::TimestampSamples,
                                        ReferenceKind reference_kind = ReferenceKind::Test, int ngram_n = 3);

/// Field-wise mean of several reports (mode/reference taken from the first).
DistanceReport mean_report(const std::vector<DistanceReport>& reports);

}  // namespace bpseval
