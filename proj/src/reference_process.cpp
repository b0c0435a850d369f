#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bpseval/error.hpp"
#include "bpseval/rng.hpp"
#include "bpseval/simulator.hpp"

namespace bpseval {

namespace {

constexpr const char* kCheckForm = "Check application form completeness";
constexpr const char* kReturnApp = "Return application back to applicant";
constexpr const char* kReceiveApp = "Receive updated application";
constexpr const char* kAppraise = "Appraise property";
constexpr const char* kCreditCheck = "Check credit history";
constexpr const char* kAmlCheck = "AML check";
constexpr const char* kAssessRisk = "Assess loan risk";
constexpr const char* kAssessElig = "Assess eligibility";
constexpr const char* kPreparePack = "Prepare acceptance pack";
constexpr const char* kApprove = "Approve application";
constexpr const char* kReject = "Reject application";
constexpr const char* kCancel = "Cancel application";

struct ActivitySpec {
  const char* name;
  const char* role;
  double median_minutes;
};

// Medians chosen so weekly utilisation stays around 0.3-0.6 per role under
// 30-minute round-the-clock arrivals and 9-17 weekday shifts.
constexpr ActivitySpec kActivities[] = {
    {kCheckForm, "clerk", 8.0},       {kReturnApp, "clerk", 5.0},       {kReceiveApp, "clerk", 6.0},
    {kAppraise, "analyst", 8.0},      {kCreditCheck, "analyst", 5.0},   {kAmlCheck, "analyst", 5.0},
    {kAssessRisk, "officer", 8.0},    {kAssessElig, "officer", 6.0},    {kPreparePack, "officer", 8.0},
    {kApprove, "manager", 6.0},       {kReject, "manager", 4.0},        {kCancel, "manager", 3.0},
};

struct RoleSpec {
  const char* role;
  const char* prefix;
  int headcount;
};

constexpr RoleSpec kRoles[] = {
    {"clerk", "Clerk", 6},
    {"analyst", "Analyst", 5},
    {"officer", "Officer", 5},
    {"manager", "Manager", 3},
};

constexpr double kDurationSigma = 0.5;
constexpr double kMeanInterArrivalMinutes = 30.0;

Timestamp reference_start() { return *parse_iso8601(kReferenceStart); }

}  // namespace

BpsModel reference_model() {
  BpsModel m;
  for (const auto& a : kActivities) m.activities.emplace_back(a.name);
  std::sort(m.activities.begin(), m.activities.end());

  auto& t = m.transitions;
  t[kStartToken] = {{kCheckForm, 1.0}};
  t[kCheckForm] = {{kReturnApp, 0.25}, {kAppraise, 0.75}};
  t[kReturnApp] = {{kReceiveApp, 0.8}, {kCancel, 0.2}};
  t[kReceiveApp] = {{kCheckForm, 1.0}};
  // The three checks run in an order that varies per case.
  t[kAppraise] = {{kCreditCheck, 0.5}, {kAmlCheck, 0.5}};
  t[kCreditCheck] = {{kAmlCheck, 0.6}, {kAssessRisk, 0.4}};
  t[kAmlCheck] = {{kCreditCheck, 0.4}, {kAssessRisk, 0.6}};
  t[kAssessRisk] = {{kAssessElig, 1.0}};
  t[kAssessElig] = {{kPreparePack, 0.6}, {kReject, 0.3}, {kCancel, 0.1}};
  t[kPreparePack] = {{kApprove, 0.9}, {kCancel, 0.1}};
  t[kApprove] = {{kEndToken, 1.0}};
  t[kReject] = {{kEndToken, 1.0}};
  t[kCancel] = {{kEndToken, 1.0}};
  t[kEndToken] = {{kEndToken, 1.0}};

  m.arrival.kind = ArrivalKind::Exponential;
  m.arrival.mean_minutes = kMeanInterArrivalMinutes;

  for (const auto& a : kActivities) {
    DurationModel d;
    d.kind = DurationKind::Lognormal;
    d.mu = std::log(a.median_minutes);
    d.sigma = kDurationSigma;
    m.durations[a.name] = d;
    m.activity_roles[a.name] = {a.role};
  }

  for (const auto& r : kRoles) {
    m.roles.roles.emplace_back(r.role);
    auto& members = m.role_resources[r.role];
    for (int i = 1; i <= r.headcount; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%s-%02d", r.prefix, i);
      members.emplace_back(name);
      m.roles.role_of[name] = r.role;
      auto& windows = m.calendars[name];
      for (int day = 0; day < 5; ++day) windows.push_back({day, 9, 17});
    }
  }
  m.first_arrival = reference_start();
  m.validate();
  return m;
}

EventLog generate_reference_log(std::uint64_t seed, std::size_t n_cases) {
  if (n_cases == 0) throw Error(Errc::InvalidArgument, "n_cases must be positive");
  const BpsModel model = reference_model();
  return simulate(model, n_cases, model.first_arrival, seed).log;
}

EventLog generate_reference_log_with_surge(std::uint64_t seed, std::size_t n_cases, std::size_t surge_from_case,
                                           double surge_multiplier) {
  if (n_cases == 0) throw Error(Errc::InvalidArgument, "n_cases must be positive");
  if (!(surge_multiplier > 0.0)) throw Error(Errc::InvalidArgument, "surge multiplier must be > 0");
  const BpsModel model = reference_model();
  std::vector<Timestamp> arrivals;
  std::int64_t t = to_epoch_seconds(model.first_arrival);
  for (std::size_t c = 0; c < n_cases; ++c) {
    if (c > 0) {
      Stream s(seed, c, StreamTag::Arrival);
      double gap = model.arrival.inter_arrival(s.uniform());
      if (c >= surge_from_case) gap /= surge_multiplier;
      t += std::llround(gap * 60.0);
    }
    arrivals.push_back(from_epoch_seconds(t));
  }
  return simulate_with_arrivals(model, arrivals, seed).log;
}

TransitionOverrides reference_gateway_edit() {
  return {
      {kCheckForm, {{kReturnApp, 0.65}, {kAppraise, 0.35}}},
      {kAssessElig, {{kPreparePack, 0.2}, {kReject, 0.7}, {kCancel, 0.1}}},
  };
}

TransitionOverrides reference_sequence_edit() {
  return {
      {kAppraise, {{kCreditCheck, 1.0}}},
      {kCreditCheck, {{kAmlCheck, 1.0}}},
      {kAmlCheck, {{kAssessRisk, 1.0}}},
  };
}

}  // namespace bpseval
