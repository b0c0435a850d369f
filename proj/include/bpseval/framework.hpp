#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpseval/eventlog.hpp"
#include "bpseval/logdistances.hpp"
#include "bpseval/ppm.hpp"
#include "bpseval/simulator.hpp"

namespace bpseval {

struct EvaluationConfig {
  std::string log_path;
  double split_ratio = 0.8;
  std::size_t replications = 10;  // R
  std::size_t seeds = 10;         // S, real-data PPM seeds
  std::uint64_t base_seed = 1;
  Scenario scenario;
  DistanceMode mode = DistanceMode::TimestampSamples;
  double role_threshold = 0.7;
  std::size_t ngram_n = 3;
  MlpHyperparameters mlp;
  /// Worker cap; never changes results.
  std::size_t jobs = 1;

  /// Throws Error(InvalidArgument) on out-of-range fields.
  void validate() const;
};

/// Reads the JSON config format documented in the README; missing keys keep defaults.
EvaluationConfig config_from_json(std::string_view text, EvaluationConfig base = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample std, 0 for a single value
  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

MeanStd mean_std(std::span<const double> values);

/// Loss entry lies inside the band `gt.mean + k * gt.std`.
bool within_noise_band(const MeanStd& loss, const MeanStd& gt, double k = 3.0);

struct TaskUtility {
  MeanStd real;
  MeanStd simulated;
  MeanStd loss;
  friend bool operator==(const TaskUtility&, const TaskUtility&) = default;
};

struct UtilityReport {
  // Config echo.
  std::string scenario;
  std::string log_path;
  double split_ratio = 0.0;
  std::size_t replications = 0;
  std::size_t seeds = 0;
  std::uint64_t base_seed = 0;
  double role_threshold = 0.0;
  MlpHyperparameters mlp;
  std::size_t train_cases = 0;
  std::size_t test_cases = 0;

  std::array<TaskUtility, kTaskCount> tasks{};
  std::vector<TaskMetricVector> real_vectors;       // one per seed
  std::vector<TaskMetricVector> simulated_vectors;  // one per replication
  std::vector<std::array<double, kTaskCount>> losses;  // one per replication
  std::vector<std::vector<std::string>> warnings;      // one list per replication

  const TaskUtility& operator[](Task t) const { return tasks[task_index(t)]; }
  friend bool operator==(const UtilityReport&, const UtilityReport&) = default;
};

/// Per replication r: |sim_r[t] - mean_s real_s[t]|.
std::vector<std::array<double, kTaskCount>> compute_utility_loss(std::span<const TaskMetricVector> real,
                                                                 std::span<const TaskMetricVector> simulated);

/// Everything a scenario run shares: split, roles, the unperturbed model and M(train).
struct PreparedEvaluation {
  TemporalSplit split;
  RoleMap roles;
  BpsModel discovered;
  std::vector<TaskMetricVector> real_vectors;
};

PreparedEvaluation prepare_utility_evaluation(const EvaluationConfig& config, const EventLog& log);
UtilityReport evaluate_scenario(const EvaluationConfig& config, const PreparedEvaluation& prepared,
                                const Scenario& scenario);

UtilityReport run_utility_evaluation(const EvaluationConfig& config, const EventLog& log);
/// Reads `config.log_path`.
UtilityReport run_utility_evaluation(const EvaluationConfig& config);

struct StandardReport {
  std::string scenario;
  std::string log_path;
  ReferenceKind reference = ReferenceKind::Test;
  DistanceMode mode = DistanceMode::TimestampSamples;
  double split_ratio = 0.0;
  std::size_t replications = 0;
  std::uint64_t base_seed = 0;
  std::size_t ngram_n = 3;
  std::size_t reference_cases = 0;
  Timestamp simulation_start;

  std::vector<DistanceReport> runs;
  DistanceReport mean;
  std::vector<std::vector<std::string>> warnings;

  friend bool operator==(const StandardReport&, const StandardReport&) = default;
};

StandardReport run_standard_practice_evaluation(const EvaluationConfig& config, const EventLog& log,
                                                ReferenceKind reference);
StandardReport run_standard_practice_evaluation(const EvaluationConfig& config, ReferenceKind reference);

/// "0.7512" for accuracies, minutes converted to the task's report unit with two decimals otherwise.
std::string format_task_value(Task task, double value);
std::string_view report_unit(Task task);

std::string render_json(const UtilityReport& report);
std::string render_markdown(const UtilityReport& report);
UtilityReport utility_report_from_json(std::string_view text);

std::string render_json(const StandardReport& report);
StandardReport standard_report_from_json(std::string_view text);

}  // namespace bpseval
