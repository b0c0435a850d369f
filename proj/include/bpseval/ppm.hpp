#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bpseval/eventlog.hpp"

namespace bpseval {

enum class Task { NAP, NRP, NPP, NWP, RTP };
inline constexpr std::size_t kTaskCount = 5;
inline constexpr std::array<Task, kTaskCount> kTasks = {Task::NAP, Task::NRP, Task::NPP, Task::NWP, Task::RTP};

std::string_view to_string(Task task);
constexpr bool is_classification(Task task) { return task == Task::NAP || task == Task::NRP; }
constexpr std::size_t task_index(Task task) { return static_cast<std::size_t>(task); }

enum class Architecture { FreqBaseline, Mlp };
inline constexpr std::size_t kArchitectureCount = 2;
inline constexpr std::array<Architecture, kArchitectureCount> kArchitectures = {Architecture::FreqBaseline,
                                                                              Architecture::Mlp};
std::string_view to_string(Architecture arch);

inline constexpr std::size_t kWindowSize = 10;
inline constexpr const char* kPadLabel = "<PAD>";
inline constexpr const char* kEndLabel = "<END>";

/// Prefix of an ongoing case plus the five prediction targets.
struct PrefixSample {
  std::array<std::string, kWindowSize> activity_window;  // oldest first, left-padded
  std::array<std::string, kWindowSize> role_window;
  double elapsed_log1p = 0.0;  // log1p(minutes since arrival at the current event's end)
  int hour_of_day = 0;         // of the current event's end
  int weekday = 0;

  std::string next_activity;  // kEndLabel after the last event
  std::optional<std::string> next_role;
  std::optional<double> npp_minutes;
  std::optional<double> nwp_minutes;
  double rtp_minutes = 0.0;

  const std::string& current_activity() const { return activity_window.back(); }
  bool has_target(Task task) const;
  double regression_target(Task task) const;
  const std::string& class_target(Task task) const;
};

/// One sample per event position, in trace order then prefix length.
std::vector<PrefixSample> extract_prefix_samples(const EventLog& log, const RoleMap& roles);

/// Label encoders shared across every predictor of one evaluation.
class Vocabulary {
public:
  static Vocabulary fit(std::span<const std::span<const PrefixSample>> sample_sets);

  std::size_t activity_count() const { return activities_.size(); }
  std::size_t role_count() const { return roles_.size(); }
  std::size_t class_count(Task task) const;
  /// -1 when the label is unknown.
  int activity_id(const std::string& label) const;
  int role_id(const std::string& label) const;
  int class_id(Task task, const std::string& label) const;
  const std::string& class_label(Task task, std::size_t id) const;

private:
  std::vector<std::string> activities_;  // includes PAD and END
  std::vector<std::string> roles_;       // includes PAD
  std::unordered_map<std::string, int> activity_ids_;
  std::unordered_map<std::string, int> role_ids_;
};

struct MlpHyperparameters {
  std::size_t hidden_units = 50;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double step_size = 1e-3;

  friend bool operator==(const MlpHyperparameters&, const MlpHyperparameters&) = default;
};

struct PredictorSpec {
  Architecture architecture = Architecture::FreqBaseline;
  Task task = Task::NAP;
  std::uint64_t seed = 0;
  MlpHyperparameters mlp;
};

class Predictor {
public:
  virtual ~Predictor() = default;
  virtual Task task() const = 0;
  /// Classification tasks only.
  virtual std::string predict_label(const PrefixSample& sample) const = 0;
  /// Regression tasks only; minutes, never negative.
  virtual double predict_minutes(const PrefixSample& sample) const = 0;
};

/// Trains on the samples whose target for `spec.task` is defined. When `vocab` is
/// null the MLP fits its own encoders on the training samples.
std::unique_ptr<Predictor> train_predictor(const PredictorSpec& spec, std::span<const PrefixSample> samples,
                                           const Vocabulary* vocab = nullptr);

/// Accuracy (NAP/NRP) or MAE in minutes (NPP/NWP/RTP) over samples with a defined target.
double evaluate_predictor(const Predictor& model, std::span<const PrefixSample> test_samples);

/// M(L): per task, the metric averaged over the architectures.
struct TaskMetricVector {
  std::array<double, kTaskCount> values{};
  std::array<std::array<double, kTaskCount>, kArchitectureCount> per_architecture{};

  double operator[](Task t) const { return values[task_index(t)]; }
  friend bool operator==(const TaskMetricVector&, const TaskMetricVector&) = default;
};

TaskMetricVector metric_vector(const EventLog& training_log, const EventLog& test_log, const RoleMap& roles,
                               std::uint64_t seed, const MlpHyperparameters& mlp = {});

}  // namespace bpseval
