#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "bpseval/error.hpp"
#include "bpseval/simulator.hpp"

namespace bpseval {

namespace {

struct KindName {
  ScenarioKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ScenarioKind::GT, "GT"},           {ScenarioKind::SeqEdit, "SEQ_EDIT"}, {ScenarioKind::GatewayEdit, "GATEWAY_EDIT"},
    {ScenarioKind::RC, "RC"},           {ScenarioKind::Ext, "EXT"},          {ScenarioKind::Dur, "DUR"},
    {ScenarioKind::Cal, "CAL"},         {ScenarioKind::Arr, "ARR"},          {ScenarioKind::MeanArrival, "MEAN_ARRIVAL"},
};

const char* kind_name(ScenarioKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

double parse_number(std::string_view text, std::string_view whole) {
  std::string s(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw Error(Errc::InvalidScenario, "bad scenario parameter in '" + std::string(whole) + "'");
  }
  return value;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Scenario Scenario::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const bool has_param = colon != std::string_view::npos;
  const std::string_view param = has_param ? text.substr(colon + 1) : std::string_view{};

  Scenario s;
  bool found = false;
  for (const auto& k : kKindNames) {
    if (head == k.name) {
      s.kind = k.kind;
      found = true;
    }
  }
  if (!found) throw Error(Errc::InvalidScenario, "unknown scenario '" + std::string(text) + "'");

  switch (s.kind) {
    case ScenarioKind::GT:
    case ScenarioKind::RC:
    case ScenarioKind::MeanArrival:
      if (has_param) throw Error(Errc::InvalidScenario, "scenario '" + std::string(head) + "' takes no parameter");
      break;
    case ScenarioKind::Dur: s.value = has_param ? parse_number(param, text) : 3.0; break;
    case ScenarioKind::Arr: s.value = has_param ? parse_number(param, text) : 2.0; break;
    case ScenarioKind::Ext: s.value = has_param ? parse_number(param, text) : 30.0; break;
    case ScenarioKind::Cal: s.value = has_param ? parse_number(param, text) : 5.0; break;
    case ScenarioKind::SeqEdit:
    case ScenarioKind::GatewayEdit:
      // Row overrides are attached by the caller (e.g. loaded from a JSON file).
      break;
  }
  s.validate();
  return s;
}

std::string Scenario::id() const {
  switch (kind) {
    case ScenarioKind::Dur:
    case ScenarioKind::Arr:
    case ScenarioKind::Ext: return std::string(kind_name(kind)) + ":" + format_number(value);
    case ScenarioKind::Cal: return std::string("CAL:") + (value >= 0 ? "+" : "") + format_number(value);
    default: return kind_name(kind);
  }
}

void Scenario::validate() const {
  switch (kind) {
    case ScenarioKind::Dur:
    case ScenarioKind::Arr:
      if (!(value > 0.0) || !std::isfinite(value)) throw Error(Errc::InvalidScenario, id() + ": multiplier must be > 0");
      break;
    case ScenarioKind::Ext:
      if (!(value >= 0.0) || !std::isfinite(value)) throw Error(Errc::InvalidScenario, id() + ": delay must be >= 0");
      break;
    case ScenarioKind::Cal:
      if (!(value > -24.0 && value < 24.0) || value != std::floor(value)) {
        throw Error(Errc::InvalidScenario, id() + ": shift must be a whole number of hours in (-24, 24)");
      }
      break;
    default: break;
  }
}

namespace {

std::vector<WorkWindow> shift_windows(const std::vector<WorkWindow>& windows, int shift_hours) {
  constexpr int kWeekHours = 7 * 24;
  // Shifted windows live in week-hour space; pieces crossing midnight are split per day.
  std::vector<bool> covered(kWeekHours, false);
  for (const auto& w : windows) {
    for (int h = w.start_hour; h < w.end_hour; ++h) {
      const int at = ((w.weekday * 24 + h + shift_hours) % kWeekHours + kWeekHours) % kWeekHours;
      covered[static_cast<std::size_t>(at)] = true;
    }
  }
  std::vector<WorkWindow> out;
  for (int day = 0; day < 7; ++day) {
    int h = 0;
    while (h < 24) {
      if (!covered[static_cast<std::size_t>(day * 24 + h)]) {
        ++h;
        continue;
      }
      const int begin = h;
      while (h < 24 && covered[static_cast<std::size_t>(day * 24 + h)]) ++h;
      out.push_back({day, begin, h});
    }
  }
  return out;
}

void apply_overrides(BpsModel& model, const TransitionOverrides& overrides) {
  const std::set<std::string> known(model.activities.begin(), model.activities.end());
  for (const auto& [from, row] : overrides) {
    if (from != kStartToken && !known.count(from)) {
      throw Error(Errc::InvalidOverride, "override row for unknown activity '" + from + "'");
    }
    double total = 0.0;
    for (const auto& [to, w] : row) {
      if (to != kEndToken && !known.count(to)) {
        throw Error(Errc::InvalidOverride, "override row '" + from + "' targets unknown activity '" + to + "'");
      }
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidOverride, "override row '" + from + "' has a bad weight");
      total += w;
    }
    if (!(total > 0.0)) throw Error(Errc::InvalidOverride, "override row '" + from + "' has zero total weight");
    auto& target = model.transitions[from];
    target.clear();
    for (const auto& [to, w] : row) target[to] = w / total;
  }
}

}  // namespace

BpsModel perturb_model(const BpsModel& model, const Scenario& scenario) {
  scenario.validate();
  BpsModel out = model;
  switch (scenario.kind) {
    case ScenarioKind::GT: break;
    case ScenarioKind::SeqEdit:
    case ScenarioKind::GatewayEdit: apply_overrides(out, scenario.overrides); break;
    case ScenarioKind::RC: {
      std::set<std::string> kept;
      for (auto& [role, resources] : out.role_resources) {
        resources.resize((resources.size() + 1) / 2);
        kept.insert(resources.begin(), resources.end());
      }
      for (auto it = out.roles.role_of.begin(); it != out.roles.role_of.end();) {
        it = kept.count(it->first) ? std::next(it) : out.roles.role_of.erase(it);
      }
      for (auto it = out.calendars.begin(); it != out.calendars.end();) {
        it = kept.count(it->first) ? std::next(it) : out.calendars.erase(it);
      }
      break;
    }
    case ScenarioKind::Ext: out.extraneous_delay_minutes = scenario.value; break;
    case ScenarioKind::Dur:
      for (auto& [activity, d] : out.durations) d.scale *= scenario.value;
      break;
    case ScenarioKind::Cal:
      for (auto& [resource, windows] : out.calendars) {
        windows = shift_windows(windows, static_cast<int>(scenario.value));
      }
      break;
    case ScenarioKind::Arr:
      out.arrival.mean_minutes /= scenario.value;
      for (auto& v : out.arrival.sample_minutes) v /= scenario.value;
      break;
    case ScenarioKind::MeanArrival: {
      const double mean = out.arrival.mean();
      out.arrival.kind = ArrivalKind::MeanDegenerate;
      out.arrival.mean_minutes = mean;
      out.arrival.sample_minutes.clear();
      break;
    }
  }
  out.validate();
  return out;
}

}  // namespace bpseval
