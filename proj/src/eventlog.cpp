#include "bpseval/eventlog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "bpseval/error.hpp"

namespace bpseval {

bool event_order_less(const Event& a, const Event& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.activity < b.activity;
}

Trace::Trace(std::string case_id, std::vector<Event> events)
    : case_id_(std::move(case_id)), events_(std::move(events)) {
  if (events_.empty()) {
    throw Error(Errc::EmptyLog, "trace '" + case_id_ + "' has no events");
  }
  for (const auto& e : events_) {
    if (e.case_id != case_id_) {
      throw Error(Errc::InvalidArgument, "event of case '" + e.case_id + "' placed in trace '" + case_id_ + "'");
    }
    if (e.activity.empty() || e.resource.empty()) {
      throw Error(Errc::InvalidArgument, "empty activity or resource label in case '" + case_id_ + "'");
    }
    if (e.end < e.start) {
      throw Error(Errc::EndBeforeStart, "event '" + e.activity + "' of case '" + case_id_ + "' ends before it starts");
    }
  }
  std::stable_sort(events_.begin(), events_.end(), event_order_less);
}

EventLog::EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
  std::set<std::string> seen;
  for (const auto& t : traces_) {
    if (!seen.insert(t.case_id()).second) {
      throw Error(Errc::InvalidArgument, "duplicate case id '" + t.case_id() + "'");
    }
    for (const auto& e : t.events()) {
      alphabet_.insert(e.activity);
      resources_.insert(e.resource);
    }
  }
}

EventLog EventLog::from_events(std::vector<Event> events) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Event>> grouped;
  for (auto& e : events) {
    auto [it, inserted] = grouped.try_emplace(e.case_id);
    if (inserted) order.push_back(e.case_id);
    it->second.push_back(std::move(e));
  }
  std::vector<Trace> traces;
  traces.reserve(order.size());
  for (const auto& id : order) traces.emplace_back(id, std::move(grouped[id]));
  return EventLog(std::move(traces));
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& t : traces_) n += t.size();
  return n;
}

Timestamp EventLog::earliest_timestamp() const {
  if (traces_.empty()) throw Error(Errc::EmptyLog, "event log is empty");
  Timestamp best = traces_.front().arrival();
  for (const auto& t : traces_) best = std::min(best, t.arrival());
  return best;
}

const std::string& RoleMap::lookup(const std::string& resource) const {
  static const std::string unknown = kUnknownRole;
  auto it = role_of.find(resource);
  return it == role_of.end() ? unknown : it->second;
}

std::vector<std::string> RoleMap::members(const std::string& role) const {
  std::vector<std::string> out;
  for (const auto& [resource, r] : role_of) {
    if (r == role) out.push_back(resource);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

EventLog read_event_log_csv(std::istream& in, const std::string& source_name) {
  static const char* const kColumns[] = {"case_id", "activity", "resource", "start_time", "end_time"};

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> column_index(5, std::string::npos);
  bool have_header = false;
  std::vector<Event> events;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;

    auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t c = 0; c < 5; ++c) {
        for (std::size_t f = 0; f < fields.size(); ++f) {
          if (trim(fields[f]) == kColumns[c]) column_index[c] = f;
        }
        if (column_index[c] == std::string::npos) {
          throw Error(Errc::MissingColumn, source_name + ": missing column '" + kColumns[c] + "'");
        }
      }
      have_header = true;
      continue;
    }

    const std::string row = source_name + " line " + std::to_string(line_no);
    auto field = [&](std::size_t c) -> std::string {
      const std::size_t idx = column_index[c];
      if (idx >= fields.size()) {
        throw Error(Errc::MissingColumn, row + ": missing value for '" + kColumns[c] + "'");
      }
      return trim(fields[idx]);
    };

    Event e;
    e.case_id = field(0);
    e.activity = field(1);
    e.resource = field(2);
    const std::string start_text = field(3);
    const std::string end_text = field(4);
    if (e.case_id.empty() || e.activity.empty() || e.resource.empty()) {
      throw Error(Errc::InvalidArgument, row + ": empty case_id, activity or resource");
    }
    const auto start = parse_iso8601(start_text);
    if (!start) throw Error(Errc::UnparsableTimestamp, row + ": cannot parse start_time '" + start_text + "'");
    const auto end = parse_iso8601(end_text);
    if (!end) throw Error(Errc::UnparsableTimestamp, row + ": cannot parse end_time '" + end_text + "'");
    if (*end < *start) throw Error(Errc::EndBeforeStart, row + ": end_time precedes start_time");
    e.start = *start;
    e.end = *end;
    events.push_back(std::move(e));
  }

  if (!have_header) throw Error(Errc::MissingColumn, source_name + ": no header row");
  if (events.empty()) throw Error(Errc::EmptyLog, source_name + ": no events");
  return EventLog::from_events(std::move(events));
}

EventLog parse_event_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  return read_event_log_csv(in, path.string());
}

void write_event_log_csv(const EventLog& log, std::ostream& out) {
  out << "case_id,activity,resource,start_time,end_time\n";
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) {
      out << csv_escape(e.case_id) << ',' << csv_escape(e.activity) << ',' << csv_escape(e.resource) << ','
          << format_iso8601(e.start) << ',' << format_iso8601(e.end) << '\n';
    }
  }
}

std::string event_log_to_csv(const EventLog& log) {
  std::ostringstream os;
  write_event_log_csv(log, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Splitting and derived quantities

TemporalSplit temporal_split(const EventLog& log, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(Errc::InvalidArgument, "split ratio must lie in (0, 1)");
  }
  const std::size_t n = log.size();
  if (n < 2) throw Error(Errc::DegenerateSplit, "need at least 2 traces to split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& traces = log.traces();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (traces[a].arrival() != traces[b].arrival()) return traces[a].arrival() < traces[b].arrival();
    return traces[a].case_id() < traces[b].case_id();
  });

  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw Error(Errc::DegenerateSplit, "ratio " + std::to_string(ratio) + " on " + std::to_string(n) +
                                           " traces leaves one side empty");
  }

  std::vector<Trace> train, test;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).push_back(traces[order[i]]);
  }
  TemporalSplit split;
  split.boundary = test.front().arrival();
  split.train = EventLog(std::move(train));
  split.test = EventLog(std::move(test));
  split.ratio = ratio;
  return split;
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

RoleMap derive_roles(const EventLog& log, double similarity_threshold) {
  if (log.empty()) throw Error(Errc::EmptyLog, "cannot derive roles from an empty log");

  std::vector<std::string> resources;
  std::map<std::string, std::size_t> resource_index;
  std::map<std::string, std::size_t> activity_index;
  for (const auto& a : log.activity_alphabet()) activity_index.emplace(a, activity_index.size());
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) {
      if (resource_index.emplace(e.resource, resources.size()).second) resources.push_back(e.resource);
    }
  }

  std::vector<std::vector<double>> profile(resources.size(), std::vector<double>(activity_index.size(), 0.0));
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) profile[resource_index[e.resource]][activity_index[e.activity]] += 1.0;
  }
  std::vector<double> norm(resources.size());
  for (std::size_t r = 0; r < resources.size(); ++r) {
    norm[r] = std::sqrt(std::inner_product(profile[r].begin(), profile[r].end(), profile[r].begin(), 0.0));
  }

  DisjointSet components(resources.size());
  for (std::size_t a = 0; a < resources.size(); ++a) {
    for (std::size_t b = a + 1; b < resources.size(); ++b) {
      const double dot = std::inner_product(profile[a].begin(), profile[a].end(), profile[b].begin(), 0.0);
      // Tolerance so an exact cosine tie (integer counts) is not lost to rounding.
      if (dot / (norm[a] * norm[b]) >= similarity_threshold - 1e-12) components.unite(a, b);
    }
  }

  RoleMap roles;
  std::map<std::size_t, std::string> root_label;
  for (std::size_t r = 0; r < resources.size(); ++r) {
    const std::size_t root = components.find(r);
    auto it = root_label.find(root);
    if (it == root_label.end()) {
      it = root_label.emplace(root, "role_" + std::to_string(roles.roles.size())).first;
      roles.roles.push_back(it->second);
    }
    roles.role_of[resources[r]] = it->second;
  }
  return roles;
}

std::vector<double> cycle_times(const EventLog& log) {
  if (log.empty()) throw Error(Errc::EmptyLog, "cycle times of an empty log");
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& t : log.traces()) out.push_back(hours_between(t.arrival(), t.completion()));
  return out;
}

std::vector<Timestamp> sorted_arrivals(const EventLog& log) {
  std::vector<Timestamp> arrivals;
  arrivals.reserve(log.size());
  for (const auto& t : log.traces()) arrivals.push_back(t.arrival());
  std::sort(arrivals.begin(), arrivals.end());
  return arrivals;
}

std::vector<double> inter_arrival_minutes(const EventLog& log) {
  const auto arrivals = sorted_arrivals(log);
  std::vector<double> gaps;
  for (std::size_t i = 1; i < arrivals.size(); ++i) gaps.push_back(minutes_between(arrivals[i - 1], arrivals[i]));
  return gaps;
}

}  // namespace bpseval
