#include "bpseval/logdistances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "bpseval/error.hpp"

namespace bpseval {

std::string_view to_string(DistanceMode mode) {
  return mode == DistanceMode::TimestampSamples ? "TIMESTAMP_SAMPLES" : "HOURLY_COUNTS";
}

std::string_view to_string(ReferenceKind kind) { return kind == ReferenceKind::Test ? "TEST" : "TRAIN"; }

DistanceMode parse_distance_mode(std::string_view text) {
  if (text == "TIMESTAMP_SAMPLES" || text == "timestamp" || text == "timestamps") return DistanceMode::TimestampSamples;
  if (text == "HOURLY_COUNTS" || text == "hourly" || text == "counts") return DistanceMode::HourlyCounts;
  throw Error(Errc::InvalidArgument, "unknown distance mode '" + std::string(text) + "'");
}

ReferenceKind parse_reference_kind(std::string_view text) {
  if (text == "TEST" || text == "test") return ReferenceKind::Test;
  if (text == "TRAIN" || text == "train") return ReferenceKind::Train;
  throw Error(Errc::InvalidArgument, "unknown reference kind '" + std::string(text) + "'");
}

namespace {

double hour_index(Timestamp origin, Timestamp t) {
  return static_cast<double>((t - origin).count() / kSecondsPerHour);
}

ProxyKind proxy_for(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Aedd: return ProxyKind::AbsEvent;
    case DistanceKind::Cadd: return ProxyKind::CaseArrival;
    case DistanceKind::Redd: return ProxyKind::RelEvent;
    case DistanceKind::Ctdd: return ProxyKind::CycleTime;
  }
  return ProxyKind::AbsEvent;
}

}  // namespace

HourSeries extract_proxy(const EventLog& log, ProxyKind kind, Timestamp origin) {
  if (log.empty()) throw Error(Errc::EmptyLog, "proxy extraction on an empty log");
  if ((kind == ProxyKind::AbsEvent || kind == ProxyKind::CaseArrival) && origin > log.earliest_timestamp()) {
    throw Error(Errc::OriginAfterData, "origin " + format_iso8601(origin) + " is after the earliest timestamp");
  }

  HourSeries series{origin, {}};
  for (const auto& t : log.traces()) {
    switch (kind) {
      case ProxyKind::AbsEvent:
        for (const auto& e : t.events()) {
          series.values.push_back(hour_index(origin, e.start));
          series.values.push_back(hour_index(origin, e.end));
        }
        break;
      case ProxyKind::CaseArrival:
        series.values.push_back(hour_index(origin, t.arrival()));
        break;
      case ProxyKind::RelEvent:
        for (const auto& e : t.events()) series.values.push_back(hour_index(t.arrival(), e.start));
        break;
      case ProxyKind::CycleTime:
        series.values.push_back(hours_between(t.arrival(), t.completion()));
        break;
    }
  }
  return series;
}

CountSequence to_count_sequence(const HourSeries& series, int horizon_hours) {
  if (horizon_hours <= 0) throw Error(Errc::InvalidArgument, "horizon must be positive");
  CountSequence seq{series.origin, std::vector<double>(static_cast<std::size_t>(horizon_hours), 0.0)};
  for (double v : series.values) {
    const double bin = std::floor(v);
    if (bin < 0.0 || bin >= horizon_hours) {
      throw Error(Errc::HorizonTooSmall,
                  "hour index " + std::to_string(bin) + " outside horizon " + std::to_string(horizon_hours));
    }
    seq.counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  return seq;
}

// ---------------------------------------------------------------------------

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, double> gram_counts(const EventLog& log, int n) {
  static const std::string kStart = "\x01START";
  static const std::string kEnd = "\x01END";
  std::map<Gram, double> counts;
  for (const auto& t : log.traces()) {
    std::vector<std::string> seq(static_cast<std::size_t>(n - 1), kStart);
    for (const auto& e : t.events()) seq.push_back(e.activity);
    seq.push_back(kEnd);
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
      counts[Gram(seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(i) + n)] += 1.0;
    }
  }
  return counts;
}

}  // namespace

double ngd(const EventLog& sim, const EventLog& ref, int n) {
  if (sim.empty() || ref.empty()) throw Error(Errc::EmptyLog, "ngd needs non-empty logs");
  if (n < 2) throw Error(Errc::InvalidArgument, "ngd needs n >= 2");
  const auto fs = gram_counts(sim, n);
  const auto fr = gram_counts(ref, n);

  double diff = 0.0, total = 0.0;
  auto a = fs.begin();
  auto b = fr.begin();
  while (a != fs.end() || b != fr.end()) {
    if (b == fr.end() || (a != fs.end() && a->first < b->first)) {
      diff += a->second;
      total += a->second;
      ++a;
    } else if (a == fs.end() || b->first < a->first) {
      diff += b->second;
      total += b->second;
      ++b;
    } else {
      diff += std::abs(a->second - b->second);
      total += a->second + b->second;
      ++a;
      ++b;
    }
  }
  return diff / total;
}

double distribution_distance(const EventLog& sim, const EventLog& ref, DistanceKind kind, DistanceMode mode) {
  if (sim.empty() || ref.empty()) throw Error(Errc::EmptyLog, "distribution distance needs non-empty logs");
  const Timestamp origin = std::min(sim.earliest_timestamp(), ref.earliest_timestamp());
  const ProxyKind proxy = proxy_for(kind);
  const HourSeries xs = extract_proxy(sim, proxy, origin);
  const HourSeries ys = extract_proxy(ref, proxy, origin);

  if (mode == DistanceMode::TimestampSamples) {
    return w1_quantile(Sample1D(xs.values), Sample1D(ys.values));
  }
  double max_index = 0.0;
  for (double v : xs.values) max_index = std::max(max_index, std::floor(v));
  for (double v : ys.values) max_index = std::max(max_index, std::floor(v));
  const int horizon = static_cast<int>(max_index) + 1;
  return w1_sorted(Sample1D(to_count_sequence(xs, horizon).counts), Sample1D(to_count_sequence(ys, horizon).counts));
}

double cedd(const EventLog& sim, const EventLog& ref) {
  if (sim.empty() || ref.empty()) throw Error(Errc::EmptyLog, "cedd needs non-empty logs");
  auto by_weekday = [](const EventLog& log) {
    std::array<std::vector<double>, 7> hours;
    for (const auto& t : log.traces()) {
      for (const auto& e : t.events()) {
        hours[static_cast<std::size_t>(weekday_of(e.start))].push_back(hour_of_day(e.start));
      }
    }
    return hours;
  };
  const auto hs = by_weekday(sim);
  const auto hr = by_weekday(ref);

  double sum = 0.0;
  int days = 0;
  for (std::size_t d = 0; d < 7; ++d) {
    const bool in_sim = !hs[d].empty();
    const bool in_ref = !hr[d].empty();
    if (!in_sim && !in_ref) continue;
    ++days;
    sum += (in_sim && in_ref) ? w1_quantile(Sample1D(hs[d]), Sample1D(hr[d])) : kCeddPenalty;
  }
  return sum / days;
}

DistanceReport standard_practice_report(const EventLog& sim, const EventLog& ref, DistanceMode mode,
                                        ReferenceKind reference_kind, int ngram_n) {
  DistanceReport r;
  r.ngd = ngd(sim, ref, ngram_n);
  r.aedd = distribution_distance(sim, ref, DistanceKind::Aedd, mode);
  r.cadd = distribution_distance(sim, ref, DistanceKind::Cadd, mode);
  r.cedd = cedd(sim, ref);
  r.redd = distribution_distance(sim, ref, DistanceKind::Redd, mode);
  r.ctdd = distribution_distance(sim, ref, DistanceKind::Ctdd, mode);
  r.mode = mode;
  r.reference_kind = reference_kind;
  return r;
}

DistanceReport mean_report(const std::vector<DistanceReport>& reports) {
  if (reports.empty()) throw Error(Errc::InvalidArgument, "mean of zero reports");
  DistanceReport m;
  m.mode = reports.front().mode;
  m.reference_kind = reports.front().reference_kind;
  for (const auto& r : reports) {
    m.ngd += r.ngd;
    m.aedd += r.aedd;
    m.cadd += r.cadd;
    m.cedd += r.cedd;
    m.redd += r.redd;
    m.ctdd += r.ctdd;
  }
  const double k = static_cast<double>(reports.size());
  m.ngd /= k;
  m.aedd /= k;
  m.cadd /= k;
  m.cedd /= k;
  m.redd /= k;
  m.ctdd /= k;
  return m;
}

}  // namespace bpseval
