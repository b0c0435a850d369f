#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpseval/eventlog.hpp"

namespace bpseval {

inline constexpr const char* kStartToken = "<START>";
inline constexpr const char* kEndToken = "<END>";
inline constexpr std::size_t kMaxEventsPerCase = 1000;

enum class ArrivalKind { Exponential, Empirical, MeanDegenerate };
enum class DurationKind { Lognormal, Empirical };

struct ArrivalModel {
  ArrivalKind kind = ArrivalKind::Exponential;
  double mean_minutes = 30.0;
  std::vector<double> sample_minutes;  // sorted; EMPIRICAL only

  /// Inter-arrival gap in minutes by inverse transform of u in (0,1).
  double inter_arrival(double u) const;
  double mean() const;

  friend bool operator==(const ArrivalModel&, const ArrivalModel&) = default;
};

struct DurationModel {
  DurationKind kind = DurationKind::Empirical;
  double mu = 0.0;     // LOGNORMAL: mean of log-minutes
  double sigma = 0.0;  // LOGNORMAL: stddev of log-minutes
  std::vector<double> sample_minutes;  // sorted; EMPIRICAL only
  double scale = 1.0;  // multiplier applied on top of the sampled value

  /// Unscaled duration in minutes by inverse transform of u in (0,1).
  double base_minutes(double u) const;
  /// Scaled duration, whole seconds: round(scale * round(base * 60)).
  std::int64_t seconds(double u) const;

  friend bool operator==(const DurationModel&, const DurationModel&) = default;
};

/// Working window [start_hour, end_hour) on one weekday (Monday = 0).
struct WorkWindow {
  int weekday = 0;
  int start_hour = 0;
  int end_hour = 24;

  auto operator<=>(const WorkWindow&) const = default;
};

/// Frequentist simulation model discovered from (or hand-built like) an event log.
struct BpsModel {
  std::vector<std::string> activities;
  /// from -> (to -> probability). Rows for <START> and every activity, plus the
  /// absorbing <END> row {<END>: 1}.
  std::map<std::string, std::map<std::string, double>> transitions;
  ArrivalModel arrival;
  std::map<std::string, DurationModel> durations;
  double extraneous_delay_minutes = 0.0;
  RoleMap roles;
  std::map<std::string, std::vector<std::string>> role_resources;
  std::map<std::string, std::vector<std::string>> activity_roles;
  std::map<std::string, std::vector<WorkWindow>> calendars;
  Timestamp first_arrival;

  /// Throws Error(InvalidModel) when an invariant is violated.
  void validate() const;

  friend bool operator==(const BpsModel&, const BpsModel&) = default;
};

enum class ScenarioKind { GT, SeqEdit, GatewayEdit, RC, Ext, Dur, Cal, Arr, MeanArrival };

using TransitionOverrides = std::map<std::string, std::map<std::string, double>>;

struct Scenario {
  ScenarioKind kind = ScenarioKind::GT;
  /// DUR/ARR multiplier, EXT delay minutes, CAL shift hours.
  double value = 0.0;
  /// SEQ_EDIT / GATEWAY_EDIT replacement rows (weights re-normalised).
  TransitionOverrides overrides;

  /// Parses `KIND[:param]`, e.g. `DUR:3.0`, `ARR:2`, `CAL:+5`, `RC`, `EXT:30`, `MEAN_ARRIVAL`, `GT`.
  static Scenario parse(std::string_view text);
  std::string id() const;
  void validate() const;
};

struct SimulationResult {
  EventLog log;
  std::size_t truncated_cases = 0;
  std::vector<std::string> warnings;
};

BpsModel discover_model(const EventLog& train, double role_threshold = 0.7);

SimulationResult simulate(const BpsModel& model, std::size_t n_cases, Timestamp start, std::uint64_t seed);

/// Same engine with caller-supplied arrival instants (one case per entry, ascending).
SimulationResult simulate_with_arrivals(const BpsModel& model, std::span<const Timestamp> arrivals,
                                        std::uint64_t seed);

BpsModel perturb_model(const BpsModel& model, const Scenario& scenario);

/// Earliest instant >= t inside one of the windows (windows must be non-empty).
Timestamp next_working_instant(std::span<const WorkWindow> windows, Timestamp t);

// Built-in loan-application-like ground truth: 12 activities, 19 resources in 4 roles.
inline constexpr std::string_view kReferenceStart = "2024-01-01T00:00:00Z";
BpsModel reference_model();
EventLog generate_reference_log(std::uint64_t seed, std::size_t n_cases);

/// Reference process whose inter-arrival gaps are divided by `surge_multiplier` from
/// case index `surge_from_case` onwards.
EventLog generate_reference_log_with_surge(std::uint64_t seed, std::size_t n_cases, std::size_t surge_from_case,
                                           double surge_multiplier);

/// Overrides that move probability mass at the reference process's gateways.
TransitionOverrides reference_gateway_edit();
/// Overrides that turn the reference process's check block into a fixed sequence.
TransitionOverrides reference_sequence_edit();

// JSON (schema `bpseval.model/1`, see README).
std::string model_to_json(const BpsModel& model);
BpsModel model_from_json(std::string_view text);
TransitionOverrides overrides_from_json(std::string_view text);

}  // namespace bpseval
