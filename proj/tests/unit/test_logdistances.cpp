#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bpseval/error.hpp"
#include "bpseval/logdistances.hpp"
#include "bpseval/simulator.hpp"
#include "support.hpp"

using namespace bpseval;
using testsupport::at_minutes;
using testsupport::ev;
using testsupport::ts;

namespace {

// One single-event case per entry, arriving at the given hour offset (plus minutes).
EventLog cases_at_hours(const std::vector<double>& hours, const std::string& prefix = "c") {
  std::vector<Event> events;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    events.push_back(ev(prefix + std::to_string(i), "A", "R", at_minutes(hours[i] * 60.0),
                        at_minutes(hours[i] * 60.0 + 1)));
  }
  return EventLog::from_events(std::move(events));
}

// Traces given as activity strings, one event per character.
EventLog traces_of(const std::vector<std::string>& seqs) {
  std::vector<Event> events;
  for (std::size_t c = 0; c < seqs.size(); ++c) {
    for (std::size_t i = 0; i < seqs[c].size(); ++i) {
      events.push_back(ev("t" + std::to_string(c), std::string(1, seqs[c][i]), "R", at_minutes(10.0 * i),
                          at_minutes(10.0 * i + 5)));
    }
  }
  return EventLog::from_events(std::move(events));
}

}  // namespace

TEST_CASE("ABS_EVENT puts both timestamps of a short event in one bin") {
  const EventLog log = EventLog::from_events({ev("c", "A", "R", ts("2024-01-01T10:15:00Z"), ts("2024-01-01T10:45:00Z"))});
  const HourSeries s = extract_proxy(log, ProxyKind::AbsEvent, ts("2024-01-01T10:00:00Z"));
  CHECK(s.values == std::vector<double>{0, 0});
}

TEST_CASE("CASE_ARRIVAL exactly one day after origin") {
  const EventLog log = EventLog::from_events({ev("c", "A", "R", ts("2024-01-02T10:00:00Z"), ts("2024-01-02T11:00:00Z"))});
  CHECK(extract_proxy(log, ProxyKind::CaseArrival, ts("2024-01-01T10:00:00Z")).values == std::vector<double>{24});
}

TEST_CASE("origin after the data is rejected") {
  const EventLog log = cases_at_hours({0});
  try {
    extract_proxy(log, ProxyKind::AbsEvent, at_minutes(120));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OriginAfterData);
  }
  CHECK_NOTHROW(extract_proxy(log, ProxyKind::RelEvent, at_minutes(120)));
}

TEST_CASE("REL_EVENT and CYCLE_TIME on the reference log match a direct recomputation") {
  const EventLog log = generate_reference_log(8, 150);
  const Timestamp origin = log.earliest_timestamp();
  std::vector<double> rel, ct;
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events()) rel.push_back(std::floor(static_cast<double>((e.start - t.arrival()).count()) / 3600.0));
    ct.push_back(static_cast<double>((t.completion() - t.arrival()).count()) / 3600.0);
  }
  CHECK(extract_proxy(log, ProxyKind::RelEvent, origin).values == rel);
  CHECK(extract_proxy(log, ProxyKind::CycleTime, origin).values == ct);
}

TEST_CASE("count sequences keep empty bins") {
  HourSeries s{ts("2024-01-01T00:00:00Z"), {0, 0, 1}};
  CHECK(to_count_sequence(s, 3).counts == std::vector<double>{2, 1, 0});
  s.values = {2};
  CHECK(to_count_sequence(s, 3).counts == std::vector<double>{0, 0, 1});
  try {
    to_count_sequence(s, 2);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HorizonTooSmall);
  }
}

TEST_CASE("property: count sequences conserve observations") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    HourSeries s{ts("2024-01-01T00:00:00Z"), {}};
    const int n = 1 + static_cast<int>(rng() % 50);
    for (int k = 0; k < n; ++k) s.values.push_back(static_cast<double>(rng() % 30));
    const auto c = to_count_sequence(s, 30);
    double total = 0;
    for (double v : c.counts) total += v;
    CHECK(total == n);
  }
}

TEST_CASE("NGD extremes") {
  const EventLog a = traces_of({"AB", "ABC"});
  CHECK(ngd(a, a) == 0.0);
  CHECK(ngd(a, traces_of({"XY", "Z"})) == 1.0);
}

TEST_CASE("NGD on two three-trace logs equals the enumerated gram table") {
  // sim grams (n=3): SSA x3, SAB x2, ABE x2, SAC x1, ACE x1 -> 9
  // ref grams:       SSA x3, SAB x1, ABE x1, SAC x2, ACE x2 -> 9
  // |diff| = 0 + 1 + 1 + 1 + 1 = 4 over 18.
  const EventLog sim = traces_of({"AB", "AB", "AC"});
  const EventLog ref = traces_of({"AB", "AC", "AC"});
  CHECK(ngd(sim, ref, 3) == doctest::Approx(4.0 / 18.0).epsilon(1e-15));
  // n=2: SA x3 both, AB 2/1, BE 2/1, AC 1/2, CE 1/2 -> the same 4/18.
  CHECK(ngd(sim, ref, 2) == doctest::Approx(4.0 / 18.0).epsilon(1e-15));
  // Longer traces: n=3 on "ABA" vs "AB": SSA SAB ABA BAE | SSA SAB ABE -> |diff| = 3, total 7.
  CHECK(ngd(traces_of({"ABA"}), traces_of({"AB"}), 3) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("identical logs give zero distances in both modes") {
  const EventLog log = generate_reference_log(4, 60);
  for (auto mode : {DistanceMode::TimestampSamples, DistanceMode::HourlyCounts}) {
    const DistanceReport r = standard_practice_report(log, log, mode);
    CHECK(r.ngd == 0.0);
    CHECK(r.aedd == 0.0);
    CHECK(r.cadd == 0.0);
    CHECK(r.cedd == 0.0);
    CHECK(r.redd == 0.0);
    CHECK(r.ctdd == 0.0);
    CHECK(r.mode == mode);
  }
}

TEST_CASE("HOURLY_COUNTS CADD on two hourly count vectors") {
  // Arrival counts per hour (5,5,3,1,1) and (5,4,3,1,1).
  auto expand = [](const std::vector<int>& counts) {
    std::vector<double> hours;
    for (std::size_t h = 0; h < counts.size(); ++h) {
      for (int k = 0; k < counts[h]; ++k) hours.push_back(static_cast<double>(h) + 0.1 * k);
    }
    return hours;
  };
  const EventLog sim = cases_at_hours(expand({5, 5, 3, 1, 1}), "s");
  const EventLog ref = cases_at_hours(expand({5, 4, 3, 1, 1}), "r");
  CHECK(distribution_distance(sim, ref, DistanceKind::Cadd, DistanceMode::HourlyCounts) == 0.2);
  // Permuting the hour bins of one log leaves the count-vector distance unchanged.
  const EventLog shuffled = cases_at_hours(expand({1, 3, 5, 1, 5}), "p");
  CHECK(distribution_distance(shuffled, ref, DistanceKind::Cadd, DistanceMode::HourlyCounts) == 0.2);
}

TEST_CASE("TIMESTAMP_SAMPLES CADD equals the hand-computed quantile integral") {
  // sim hours {0,1,2,3,10} vs ref {0,2,5,6}:
  // [.2,.25) 1*.05 + [.25,.4) 1*.15 + [.5,.6) 3*.1 + [.6,.75) 2*.15 + [.75,.8) 3*.05 + [.8,1) 4*.2 = 1.75
  const EventLog sim = cases_at_hours({0, 1, 2, 3, 10}, "s");
  const EventLog ref = cases_at_hours({0.5, 2, 5, 6}, "r");
  CHECK(distribution_distance(sim, ref, DistanceKind::Cadd) == doctest::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("CEDD: identity, pure penalty, mixed case") {
  const EventLog a = generate_reference_log(6, 40);
  CHECK(cedd(a, a) == 0.0);
  // 2024-01-01 is a Monday.
  const EventLog mon = EventLog::from_events({ev("a", "A", "R", ts("2024-01-01T09:00:00Z"), ts("2024-01-01T09:10:00Z"))});
  const EventLog tue = EventLog::from_events({ev("b", "A", "R", ts("2024-01-02T09:00:00Z"), ts("2024-01-02T09:10:00Z"))});
  CHECK(cedd(mon, tue) == 24.0);
  // sim: Mon 09:xx and 11:xx, Wed 10:xx; ref: Mon 10:xx twice, Thu 08:xx.
  // Mon W1({9,11},{10,10}) = 1; Wed and Thu one-sided -> 24 each; mean over 3 weekdays.
  const EventLog sim = EventLog::from_events({ev("s1", "A", "R", ts("2024-01-01T09:30:00Z"), ts("2024-01-01T09:40:00Z")),
                                              ev("s2", "A", "R", ts("2024-01-01T11:30:00Z"), ts("2024-01-01T11:40:00Z")),
                                              ev("s3", "A", "R", ts("2024-01-03T10:00:00Z"), ts("2024-01-03T10:10:00Z"))});
  const EventLog ref = EventLog::from_events({ev("r1", "A", "R", ts("2024-01-01T10:05:00Z"), ts("2024-01-01T10:10:00Z")),
                                              ev("r2", "A", "R", ts("2024-01-01T10:50:00Z"), ts("2024-01-01T10:55:00Z")),
                                              ev("r3", "A", "R", ts("2024-01-04T08:00:00Z"), ts("2024-01-04T08:10:00Z"))});
  CHECK(cedd(sim, ref) == doctest::Approx(49.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("report fields equal the individually invoked metrics") {
  const EventLog sim = generate_reference_log(1, 50);
  const EventLog ref = generate_reference_log(2, 60);
  for (auto mode : {DistanceMode::TimestampSamples, DistanceMode::HourlyCounts}) {
    const DistanceReport r = standard_practice_report(sim, ref, mode, ReferenceKind::Train, 3);
    CHECK(r.ngd == ngd(sim, ref, 3));
    CHECK(r.aedd == distribution_distance(sim, ref, DistanceKind::Aedd, mode));
    CHECK(r.cadd == distribution_distance(sim, ref, DistanceKind::Cadd, mode));
    CHECK(r.redd == distribution_distance(sim, ref, DistanceKind::Redd, mode));
    CHECK(r.ctdd == distribution_distance(sim, ref, DistanceKind::Ctdd, mode));
    CHECK(r.cedd == cedd(sim, ref));
    CHECK(r.reference_kind == ReferenceKind::Train);
  }
}

TEST_CASE("property: distances are symmetric and bounded") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const EventLog a = generate_reference_log(seed, 30);
    const EventLog b = generate_reference_log(seed + 100, 25);
    for (auto mode : {DistanceMode::TimestampSamples, DistanceMode::HourlyCounts}) {
      const DistanceReport ab = standard_practice_report(a, b, mode), ba = standard_practice_report(b, a, mode);
      CHECK(ab == ba);
      CHECK(ab.ngd >= 0.0);
      CHECK(ab.ngd <= 1.0);
      CHECK(ab.cedd >= 0.0);
      CHECK(ab.cedd <= 24.0);
    }
  }
}

TEST_CASE("AEDD observes every start and every end") {
  const EventLog log = generate_reference_log(9, 40);
  CHECK(extract_proxy(log, ProxyKind::AbsEvent, log.earliest_timestamp()).values.size() == 2 * log.event_count());
}

TEST_CASE("distance mode and reference names parse back") {
  CHECK(parse_distance_mode(to_string(DistanceMode::HourlyCounts)) == DistanceMode::HourlyCounts);
  CHECK(parse_reference_kind("train") == ReferenceKind::Train);
  CHECK(parse_reference_kind("TEST") == ReferenceKind::Test);
  CHECK_THROWS_AS(parse_distance_mode("sideways"), Error);
}
