#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "bpseval/eventlog.hpp"
#include "bpseval/timeutil.hpp"

namespace testsupport {

inline bpseval::Timestamp ts(const std::string& iso) { return *bpseval::parse_iso8601(iso); }

inline bpseval::Timestamp at_minutes(double minutes, const std::string& base = "2024-01-01T00:00:00Z") {
  return ts(base) + std::chrono::seconds(static_cast<long long>(minutes * 60.0));
}

inline bpseval::Event ev(const std::string& c, const std::string& a, const std::string& r, bpseval::Timestamp s,
                         bpseval::Timestamp e) {
  return {c, a, r, s, e};
}

/// Scratch directory under the system temp dir, wiped on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bpseval_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Chain A -> B -> ... per case, one event every `gap` minutes, `dur` minutes long.
inline bpseval::EventLog chain_log(const std::vector<std::string>& acts, int cases, double dur = 10.0,
                                   double arrival_gap = 60.0) {
  std::vector<bpseval::Event> events;
  for (int c = 0; c < cases; ++c) {
    double t = c * arrival_gap;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      events.push_back(ev("c" + std::to_string(c), acts[i], "R" + std::to_string(i), at_minutes(t),
                          at_minutes(t + dur)));
      t += dur;
    }
  }
  return bpseval::EventLog::from_events(std::move(events));
}

}  // namespace testsupport
