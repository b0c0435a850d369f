#include <json.hpp>

#include "bpseval/error.hpp"
#include "bpseval/simulator.hpp"

namespace bpseval {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "bpseval.model/1";

const char* arrival_kind_name(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::Exponential: return "EXPONENTIAL";
    case ArrivalKind::Empirical: return "EMPIRICAL";
    case ArrivalKind::MeanDegenerate: return "MEAN_DEGENERATE";
  }
  return "?";
}

ArrivalKind arrival_kind_from(const std::string& s) {
  if (s == "EXPONENTIAL") return ArrivalKind::Exponential;
  if (s == "EMPIRICAL") return ArrivalKind::Empirical;
  if (s == "MEAN_DEGENERATE") return ArrivalKind::MeanDegenerate;
  throw Error(Errc::InvalidModel, "unknown arrival kind '" + s + "'");
}

}  // namespace

std::string model_to_json(const BpsModel& m) {
  ojson j;
  j["schema"] = kSchema;
  j["activities"] = m.activities;

  ojson transitions = ojson::object();
  for (const auto& [from, row] : m.transitions) {
    ojson r = ojson::object();
    for (const auto& [to, p] : row) r[to] = p;
    transitions[from] = r;
  }
  j["transitions"] = transitions;

  ojson arrival;
  arrival["kind"] = arrival_kind_name(m.arrival.kind);
  arrival["mean_minutes"] = m.arrival.mean_minutes;
  arrival["sample_minutes"] = m.arrival.sample_minutes;
  j["arrival"] = arrival;

  ojson durations = ojson::object();
  for (const auto& [a, d] : m.durations) {
    ojson dj;
    if (d.kind == DurationKind::Lognormal) {
      dj["kind"] = "LOGNORMAL";
      dj["mu"] = d.mu;
      dj["sigma"] = d.sigma;
    } else {
      dj["kind"] = "EMPIRICAL";
      dj["sample_minutes"] = d.sample_minutes;
    }
    dj["scale"] = d.scale;
    durations[a] = dj;
  }
  j["durations"] = durations;
  j["extraneous_delay_minutes"] = m.extraneous_delay_minutes;

  ojson roles = ojson::object();
  for (const auto& [res, role] : m.roles.role_of) roles[res] = role;
  j["roles"] = {{"labels", m.roles.roles}, {"resource_role", roles}};

  ojson role_resources = ojson::object();
  for (const auto& [role, res] : m.role_resources) role_resources[role] = res;
  j["role_resources"] = role_resources;

  ojson activity_roles = ojson::object();
  for (const auto& [a, roles_of] : m.activity_roles) activity_roles[a] = roles_of;
  j["activity_roles"] = activity_roles;

  ojson calendars = ojson::object();
  for (const auto& [res, windows] : m.calendars) {
    ojson list = ojson::array();
    for (const auto& w : windows) list.push_back({w.weekday, w.start_hour, w.end_hour});
    calendars[res] = list;
  }
  j["calendars"] = calendars;
  j["first_arrival"] = format_iso8601(m.first_arrival);
  return j.dump(2) + "\n";
}

BpsModel model_from_json(std::string_view text) {
  BpsModel m;
  try {
    const auto j = ojson::parse(text);
    if (j.value("schema", std::string{}) != kSchema) {
      throw Error(Errc::InvalidModel, "model schema must be '" + std::string(kSchema) + "'");
    }
    m.activities = j.at("activities").get<std::vector<std::string>>();
    for (const auto& [from, row] : j.at("transitions").items()) {
      for (const auto& [to, p] : row.items()) m.transitions[from][to] = p.get<double>();
    }
    const auto& arrival = j.at("arrival");
    m.arrival.kind = arrival_kind_from(arrival.at("kind").get<std::string>());
    m.arrival.mean_minutes = arrival.at("mean_minutes").get<double>();
    m.arrival.sample_minutes = arrival.value("sample_minutes", std::vector<double>{});
    for (const auto& [a, dj] : j.at("durations").items()) {
      DurationModel d;
      const auto kind = dj.at("kind").get<std::string>();
      if (kind == "LOGNORMAL") {
        d.kind = DurationKind::Lognormal;
        d.mu = dj.at("mu").get<double>();
        d.sigma = dj.at("sigma").get<double>();
      } else if (kind == "EMPIRICAL") {
        d.kind = DurationKind::Empirical;
        d.sample_minutes = dj.at("sample_minutes").get<std::vector<double>>();
      } else {
        throw Error(Errc::InvalidModel, "unknown duration kind '" + kind + "'");
      }
      d.scale = dj.value("scale", 1.0);
      m.durations[a] = std::move(d);
    }
    m.extraneous_delay_minutes = j.value("extraneous_delay_minutes", 0.0);
    const auto& roles = j.at("roles");
    m.roles.roles = roles.at("labels").get<std::vector<std::string>>();
    for (const auto& [res, role] : roles.at("resource_role").items()) m.roles.role_of[res] = role.get<std::string>();
    for (const auto& [role, res] : j.at("role_resources").items()) {
      m.role_resources[role] = res.get<std::vector<std::string>>();
    }
    for (const auto& [a, rs] : j.at("activity_roles").items()) m.activity_roles[a] = rs.get<std::vector<std::string>>();
    for (const auto& [res, list] : j.at("calendars").items()) {
      auto& windows = m.calendars[res];
      for (const auto& w : list) windows.push_back({w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>()});
    }
    const auto first = parse_iso8601(j.at("first_arrival").get<std::string>());
    if (!first) throw Error(Errc::InvalidModel, "first_arrival is not an ISO-8601 timestamp");
    m.first_arrival = *first;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidModel, std::string("malformed model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

TransitionOverrides overrides_from_json(std::string_view text) {
  TransitionOverrides out;
  try {
    const auto j = ojson::parse(text);
    for (const auto& [from, row] : j.items()) {
      for (const auto& [to, w] : row.items()) out[from][to] = w.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidOverride, std::string("malformed override JSON: ") + e.what());
  }
  return out;
}

}  // namespace bpseval
