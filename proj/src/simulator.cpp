#include "bpseval/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include <boost/math/special_functions/erf.hpp>

#include "bpseval/error.hpp"
#include "bpseval/rng.hpp"

namespace bpseval {

namespace {

double empirical_quantile(const std::vector<double>& sorted, double u) {
  const auto n = sorted.size();
  auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
  return sorted[std::min(idx, n - 1)];
}

}  // namespace

double ArrivalModel::inter_arrival(double u) const {
  switch (kind) {
    case ArrivalKind::Exponential: return -mean_minutes * std::log1p(-u);
    case ArrivalKind::Empirical: return empirical_quantile(sample_minutes, u);
    case ArrivalKind::MeanDegenerate: return mean_minutes;
  }
  return mean_minutes;
}

double ArrivalModel::mean() const {
  if (kind == ArrivalKind::Empirical && !sample_minutes.empty()) {
    return std::accumulate(sample_minutes.begin(), sample_minutes.end(), 0.0) /
           static_cast<double>(sample_minutes.size());
  }
  return mean_minutes;
}

double DurationModel::base_minutes(double u) const {
  if (kind == DurationKind::Empirical) return empirical_quantile(sample_minutes, u);
  const double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
  return std::exp(mu + sigma * z);
}

std::int64_t DurationModel::seconds(double u) const {
  const double base = std::round(base_minutes(u) * 60.0);
  return static_cast<std::int64_t>(std::llround(scale * base));
}

void BpsModel::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidModel, msg); };
  std::set<std::string> known(activities.begin(), activities.end());
  if (known.size() != activities.size()) fail("duplicate activity labels");

  auto check_row = [&](const std::string& from) {
    auto it = transitions.find(from);
    if (it == transitions.end()) fail("missing transition row for '" + from + "'");
    double sum = 0.0;
    for (const auto& [to, p] : it->second) {
      if (to != kEndToken && !known.count(to)) fail("row '" + from + "' targets unknown activity '" + to + "'");
      if (!(p >= 0.0) || !std::isfinite(p)) fail("row '" + from + "' has an invalid probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("row '" + from + "' sums to " + std::to_string(sum));
  };
  check_row(kStartToken);
  for (const auto& a : activities) check_row(a);
  auto end_row = transitions.find(kEndToken);
  if (end_row == transitions.end() || end_row->second.size() != 1 || !end_row->second.count(kEndToken)) {
    fail("<END> must be absorbing");
  }

  // Reachability from <START>.
  std::set<std::string> reached;
  std::vector<std::string> frontier{kStartToken};
  while (!frontier.empty()) {
    const auto from = frontier.back();
    frontier.pop_back();
    for (const auto& [to, p] : transitions.at(from)) {
      if (p > 0.0 && to != kEndToken && reached.insert(to).second) frontier.push_back(to);
    }
  }
  for (const auto& a : reached) {
    auto roles_it = activity_roles.find(a);
    if (roles_it == activity_roles.end() || roles_it->second.empty()) fail("activity '" + a + "' has no eligible role");
    bool staffed = false;
    for (const auto& role : roles_it->second) {
      auto rr = role_resources.find(role);
      if (rr == role_resources.end()) continue;
      for (const auto& res : rr->second) {
        auto cal = calendars.find(res);
        if (cal == calendars.end() || cal->second.empty()) fail("resource '" + res + "' has no calendar");
        staffed = true;
      }
    }
    if (!staffed) fail("activity '" + a + "' has no eligible resource");
    auto d = durations.find(a);
    if (d == durations.end()) fail("activity '" + a + "' has no duration model");
    if (d->second.kind == DurationKind::Empirical && d->second.sample_minutes.empty()) {
      fail("activity '" + a + "' has an empty duration sample");
    }
  }
  for (const auto& [res, windows] : calendars) {
    for (const auto& w : windows) {
      if (w.weekday < 0 || w.weekday > 6 || w.start_hour < 0 || w.end_hour > 24 || w.start_hour >= w.end_hour) {
        fail("resource '" + res + "' has an invalid calendar window");
      }
    }
  }
  if (arrival.kind == ArrivalKind::Empirical && arrival.sample_minutes.empty()) fail("empty inter-arrival sample");
  if (arrival.kind != ArrivalKind::Empirical && !(arrival.mean_minutes >= 0.0)) fail("negative mean inter-arrival");
  if (!(extraneous_delay_minutes >= 0.0)) fail("negative extraneous delay");
}

// ---------------------------------------------------------------------------

BpsModel discover_model(const EventLog& train, double role_threshold) {
  if (train.size() < 2) throw Error(Errc::InsufficientData, "model discovery needs at least 2 traces");

  BpsModel model;
  model.activities.assign(train.activity_alphabet().begin(), train.activity_alphabet().end());

  std::map<std::string, std::map<std::string, double>> counts;
  std::map<std::string, std::vector<double>> durations;
  for (const auto& t : train.traces()) {
    std::string prev = kStartToken;
    for (const auto& e : t.events()) {
      counts[prev][e.activity] += 1.0;
      durations[e.activity].push_back(minutes_between(e.start, e.end));
      prev = e.activity;
    }
    counts[prev][kEndToken] += 1.0;
  }
  for (auto& [from, row] : counts) {
    const double total = std::accumulate(row.begin(), row.end(), 0.0,
                                         [](double s, const auto& kv) { return s + kv.second; });
    for (auto& [to, c] : row) c /= total;
    model.transitions[from] = row;
  }
  model.transitions[kEndToken] = {{kEndToken, 1.0}};

  for (const auto& a : model.activities) {
    auto it = durations.find(a);
    if (it == durations.end() || it->second.empty()) {
      throw Error(Errc::InsufficientData, "activity '" + a + "' has no duration observations");
    }
    DurationModel d;
    d.kind = DurationKind::Empirical;
    d.sample_minutes = it->second;
    std::sort(d.sample_minutes.begin(), d.sample_minutes.end());
    model.durations[a] = std::move(d);
  }

  model.arrival.kind = ArrivalKind::Empirical;
  model.arrival.sample_minutes = inter_arrival_minutes(train);
  std::sort(model.arrival.sample_minutes.begin(), model.arrival.sample_minutes.end());
  model.arrival.mean_minutes = model.arrival.mean();

  model.roles = derive_roles(train, role_threshold);
  for (const auto& role : model.roles.roles) model.role_resources[role] = model.roles.members(role);

  std::map<std::string, std::set<std::string>> eligible;
  std::map<std::string, std::map<int, std::pair<int, int>>> active_hours;
  for (const auto& t : train.traces()) {
    for (const auto& e : t.events()) {
      eligible[e.activity].insert(model.roles.lookup(e.resource));
      const int wd = weekday_of(e.start);
      const int h = hour_of_day(e.start);
      auto [it, inserted] = active_hours[e.resource].try_emplace(wd, h, h);
      if (!inserted) {
        it->second.first = std::min(it->second.first, h);
        it->second.second = std::max(it->second.second, h);
      }
    }
  }
  for (const auto& [a, roles] : eligible) model.activity_roles[a].assign(roles.begin(), roles.end());
  for (const auto& [res, days] : active_hours) {
    auto& windows = model.calendars[res];
    for (const auto& [wd, span] : days) windows.push_back({wd, span.first, span.second + 1});
  }

  model.first_arrival = train.earliest_arrival();
  model.validate();
  return model;
}

// ---------------------------------------------------------------------------

Timestamp next_working_instant(std::span<const WorkWindow> windows, Timestamp t) {
  if (windows.empty()) throw Error(Errc::InvalidModel, "resource without working windows");
  const std::int64_t now = to_epoch_seconds(t);
  const std::int64_t week_start = now - seconds_into_week(t);
  std::int64_t best = INT64_MAX;
  for (std::int64_t week = 0; week <= 1; ++week) {
    for (const auto& w : windows) {
      const std::int64_t base = week_start + week * kSecondsPerWeek + w.weekday * kSecondsPerDay;
      const std::int64_t s = base + w.start_hour * kSecondsPerHour;
      const std::int64_t e = base + w.end_hour * kSecondsPerHour;
      if (now < e) best = std::min(best, std::max(now, s));
    }
    if (best != INT64_MAX) break;
  }
  return from_epoch_seconds(best);
}

namespace {

struct CasePlan {
  std::vector<const std::string*> activities;
  std::vector<std::int64_t> durations;
  bool truncated = false;
};

CasePlan plan_case(const BpsModel& model, std::uint64_t seed, std::uint64_t case_index) {
  Stream flow(seed, case_index, StreamTag::ControlFlow);
  Stream dur(seed, case_index, StreamTag::Duration);
  CasePlan plan;
  const std::string* current = nullptr;
  auto row = &model.transitions.at(kStartToken);
  while (true) {
    const double u = flow.uniform();
    double acc = 0.0;
    const std::string* next = nullptr;
    for (const auto& [to, p] : *row) {
      if (p <= 0.0) continue;
      next = &to;
      acc += p;
      if (u < acc) break;
    }
    if (next == nullptr || *next == kEndToken) break;
    if (plan.activities.size() == kMaxEventsPerCase) {
      plan.truncated = true;
      break;
    }
    current = next;
    plan.activities.push_back(current);
    plan.durations.push_back(model.durations.at(*current).seconds(dur.uniform()));
    row = &model.transitions.at(*current);
  }
  return plan;
}

struct Pending {
  std::int64_t enabled;
  std::size_t case_index;
  std::size_t step;
  bool operator>(const Pending& o) const {
    return std::tie(enabled, case_index, step) > std::tie(o.enabled, o.case_index, o.step);
  }
};

}  // namespace

SimulationResult simulate_with_arrivals(const BpsModel& model, std::span<const Timestamp> arrivals,
                                        std::uint64_t seed) {
  if (arrivals.empty()) throw Error(Errc::InvalidArgument, "simulation needs at least one case");
  model.validate();

  std::map<std::string, std::vector<std::string>> eligible;
  for (const auto& a : model.activities) {
    std::set<std::string> pool;
    auto roles = model.activity_roles.find(a);
    if (roles != model.activity_roles.end()) {
      for (const auto& role : roles->second) {
        auto rr = model.role_resources.find(role);
        if (rr != model.role_resources.end()) pool.insert(rr->second.begin(), rr->second.end());
      }
    }
    eligible[a].assign(pool.begin(), pool.end());
  }
  std::map<std::string, std::int64_t> free_at;
  const auto delay = static_cast<std::int64_t>(std::llround(model.extraneous_delay_minutes * 60.0));

  SimulationResult result;
  std::vector<CasePlan> plans;
  plans.reserve(arrivals.size());
  for (std::size_t c = 0; c < arrivals.size(); ++c) {
    plans.push_back(plan_case(model, seed, c));
    if (plans.back().truncated) {
      ++result.truncated_cases;
      result.warnings.push_back("CapExceeded(case_" + std::to_string(c + 1) + ")");
    }
  }

  std::vector<std::vector<Event>> case_events(arrivals.size());
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
  for (std::size_t c = 0; c < arrivals.size(); ++c) {
    if (!plans[c].activities.empty()) queue.push({to_epoch_seconds(arrivals[c]) + delay, c, 0});
  }

  while (!queue.empty()) {
    const Pending job = queue.top();
    queue.pop();
    const auto& plan = plans[job.case_index];
    const std::string& activity = *plan.activities[job.step];

    const std::string* chosen = nullptr;
    std::int64_t chosen_start = INT64_MAX;
    for (const auto& res : eligible.at(activity)) {
      const std::int64_t ready = std::max(job.enabled, free_at[res]);
      const auto start = to_epoch_seconds(next_working_instant(model.calendars.at(res), from_epoch_seconds(ready)));
      if (start < chosen_start) {  // resources are visited in lexicographic order
        chosen_start = start;
        chosen = &res;
      }
    }
    const std::int64_t end = chosen_start + plan.durations[job.step];
    free_at[*chosen] = end;

    case_events[job.case_index].push_back(Event{"case_" + std::to_string(job.case_index + 1), activity, *chosen,
                                                from_epoch_seconds(chosen_start), from_epoch_seconds(end)});
    if (job.step + 1 < plan.activities.size()) queue.push({end + delay, job.case_index, job.step + 1});
  }

  std::vector<Trace> traces;
  traces.reserve(arrivals.size());
  for (std::size_t c = 0; c < arrivals.size(); ++c) {
    if (case_events[c].empty()) continue;
    traces.emplace_back("case_" + std::to_string(c + 1), std::move(case_events[c]));
  }
  result.log = EventLog(std::move(traces));
  return result;
}

SimulationResult simulate(const BpsModel& model, std::size_t n_cases, Timestamp start, std::uint64_t seed) {
  if (n_cases == 0) throw Error(Errc::InvalidArgument, "n_cases must be positive");
  std::vector<Timestamp> arrivals;
  arrivals.reserve(n_cases);
  std::int64_t t = to_epoch_seconds(start);
  if (model.arrival.kind == ArrivalKind::Empirical) {
    // Observed gaps are replayed as seeded permutations, one pass per block, so the
    // simulated arrival span matches the observed one.
    const auto& sample = model.arrival.sample_minutes;
    std::vector<double> block;
    for (std::size_t c = 0; c < n_cases; ++c) {
      if (c > 0) {
        const std::size_t k = (c - 1) % sample.size();
        if (k == 0) {
          block = sample;
          Stream s(seed, (c - 1) / sample.size(), StreamTag::Arrival);
          for (std::size_t i = block.size(); i > 1; --i) std::swap(block[i - 1], block[s.below(i)]);
        }
        t += std::llround(block[k] * 60.0);
      }
      arrivals.push_back(from_epoch_seconds(t));
    }
    return simulate_with_arrivals(model, arrivals, seed);
  }
  for (std::size_t c = 0; c < n_cases; ++c) {
    if (c > 0) {
      Stream s(seed, c, StreamTag::Arrival);
      t += std::llround(model.arrival.inter_arrival(s.uniform()) * 60.0);
    }
    arrivals.push_back(from_epoch_seconds(t));
  }
  return simulate_with_arrivals(model, arrivals, seed);
}

}  // namespace bpseval
