#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bpseval/timeutil.hpp"

namespace bpseval {

struct Event {
  std::string case_id;
  std::string activity;
  std::string resource;
  Timestamp start;
  Timestamp end;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Orders events by (start, end, activity).
bool event_order_less(const Event& a, const Event& b);

/// One case: a non-empty, ordered event sequence sharing a case id.
class Trace {
public:
  Trace(std::string case_id, std::vector<Event> events);

  const std::string& case_id() const { return case_id_; }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Start of the first event.
  Timestamp arrival() const { return events_.front().start; }
  /// End of the last event.
  Timestamp completion() const { return events_.back().end; }

  friend bool operator==(const Trace&, const Trace&) = default;

private:
  std::string case_id_;
  std::vector<Event> events_;
};

class EventLog {
public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces);

  /// Groups events by case id; traces keep the order of first appearance.
  static EventLog from_events(std::vector<Event> events);

  const std::vector<Trace>& traces() const { return traces_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  std::size_t event_count() const;

  const std::set<std::string>& activity_alphabet() const { return alphabet_; }
  const std::set<std::string>& resource_set() const { return resources_; }

  /// Smallest start timestamp over all events.
  Timestamp earliest_timestamp() const;
  Timestamp earliest_arrival() const { return earliest_timestamp(); }

  friend bool operator==(const EventLog& a, const EventLog& b) { return a.traces_ == b.traces_; }

private:
  std::vector<Trace> traces_;
  std::set<std::string> alphabet_;
  std::set<std::string> resources_;
};

struct TemporalSplit {
  EventLog train;
  EventLog test;
  double ratio = 0.0;
  Timestamp boundary;
};

/// Resource -> role assignment covering a log's resource set.
struct RoleMap {
  std::map<std::string, std::string> role_of;
  std::vector<std::string> roles;

  static constexpr const char* kUnknownRole = "role_unknown";

  /// Role label for a resource, or kUnknownRole when the resource was never seen.
  const std::string& lookup(const std::string& resource) const;
  std::vector<std::string> members(const std::string& role) const;

  friend bool operator==(const RoleMap&, const RoleMap&) = default;
};

// CSV ingestion and emission. Header: case_id,activity,resource,start_time,end_time
EventLog parse_event_log_csv(const std::filesystem::path& path);
EventLog read_event_log_csv(std::istream& in, const std::string& source_name = "<stream>");
void write_event_log_csv(const EventLog& log, std::ostream& out);
std::string event_log_to_csv(const EventLog& log);

/// Trace-wise split on arrival order; the first round(ratio * N) traces train.
TemporalSplit temporal_split(const EventLog& log, double ratio);

/// Links resources whose activity-frequency profiles have cosine similarity
/// >= threshold; connected components become `role_0..role_{m-1}`.
RoleMap derive_roles(const EventLog& log, double similarity_threshold = 0.7);

/// Per-trace cycle time in fractional hours, trace order preserved.
std::vector<double> cycle_times(const EventLog& log);

/// Gaps between consecutive arrivals (sorted) in minutes.
std::vector<double> inter_arrival_minutes(const EventLog& log);

/// Arrival instants sorted ascending.
std::vector<Timestamp> sorted_arrivals(const EventLog& log);

}  // namespace bpseval
