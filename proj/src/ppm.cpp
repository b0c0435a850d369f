#include "bpseval/ppm.hpp"

#include <algorithm>
#include <cmath>

#include "bpseval/error.hpp"
#include "ppm_internal.hpp"

namespace bpseval {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::NAP: return "NAP";
    case Task::NRP: return "NRP";
    case Task::NPP: return "NPP";
    case Task::NWP: return "NWP";
    case Task::RTP: return "RTP";
  }
  return "?";
}

std::string_view to_string(Architecture arch) {
  return arch == Architecture::FreqBaseline ? "FREQ_BASELINE" : "MLP";
}

bool PrefixSample::has_target(Task task) const {
  switch (task) {
    case Task::NAP: return true;
    case Task::NRP: return next_role.has_value();
    case Task::NPP: return npp_minutes.has_value();
    case Task::NWP: return nwp_minutes.has_value();
    case Task::RTP: return true;
  }
  return false;
}

double PrefixSample::regression_target(Task task) const {
  switch (task) {
    case Task::NPP: return *npp_minutes;
    case Task::NWP: return *nwp_minutes;
    case Task::RTP: return rtp_minutes;
    default: throw Error(Errc::InvalidArgument, "not a regression task");
  }
}

const std::string& PrefixSample::class_target(Task task) const {
  switch (task) {
    case Task::NAP: return next_activity;
    case Task::NRP: return *next_role;
    default: throw Error(Errc::InvalidArgument, "not a classification task");
  }
}

std::vector<PrefixSample> extract_prefix_samples(const EventLog& log, const RoleMap& roles) {
  if (log.empty()) throw Error(Errc::EmptyLog, "prefix extraction on an empty log");
  std::vector<PrefixSample> out;
  out.reserve(log.event_count());
  for (const auto& trace : log.traces()) {
    const auto& ev = trace.events();
    const std::size_t n = ev.size();
    for (std::size_t i = 0; i < n; ++i) {
      PrefixSample s;
      for (std::size_t w = 0; w < kWindowSize; ++w) {
        // Slot w holds event i - (kWindowSize - 1 - w).
        const std::size_t back = kWindowSize - 1 - w;
        if (back <= i) {
          const auto& e = ev[i - back];
          s.activity_window[w] = e.activity;
          s.role_window[w] = roles.lookup(e.resource);
        } else {
          s.activity_window[w] = kPadLabel;
          s.role_window[w] = kPadLabel;
        }
      }
      s.elapsed_log1p = std::log1p(std::max(0.0, minutes_between(trace.arrival(), ev[i].end)));
      s.hour_of_day = hour_of_day(ev[i].end);
      s.weekday = weekday_of(ev[i].end);
      if (i + 1 < n) {
        const auto& next = ev[i + 1];
        s.next_activity = next.activity;
        s.next_role = roles.lookup(next.resource);
        s.npp_minutes = minutes_between(next.start, next.end);
        s.nwp_minutes = std::max(0.0, minutes_between(ev[i].end, next.start));
      } else {
        s.next_activity = kEndLabel;
      }
      s.rtp_minutes = std::max(0.0, minutes_between(ev[i].end, ev[n - 1].end));
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Vocabulary Vocabulary::fit(std::span<const std::span<const PrefixSample>> sample_sets) {
  std::set<std::string> activities, roles;
  for (const auto& set : sample_sets) {
    for (const auto& s : set) {
      for (const auto& a : s.activity_window) activities.insert(a);
      for (const auto& r : s.role_window) roles.insert(r);
      activities.insert(s.next_activity);
      if (s.next_role) roles.insert(*s.next_role);
    }
  }
  activities.erase(kPadLabel);
  activities.erase(kEndLabel);
  roles.erase(kPadLabel);

  Vocabulary v;
  v.activities_.push_back(kPadLabel);
  v.activities_.push_back(kEndLabel);
  v.activities_.insert(v.activities_.end(), activities.begin(), activities.end());
  v.roles_.push_back(kPadLabel);
  v.roles_.insert(v.roles_.end(), roles.begin(), roles.end());
  for (std::size_t i = 0; i < v.activities_.size(); ++i) v.activity_ids_[v.activities_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < v.roles_.size(); ++i) v.role_ids_[v.roles_[i]] = static_cast<int>(i);
  return v;
}

int Vocabulary::activity_id(const std::string& label) const {
  auto it = activity_ids_.find(label);
  return it == activity_ids_.end() ? -1 : it->second;
}

int Vocabulary::role_id(const std::string& label) const {
  auto it = role_ids_.find(label);
  return it == role_ids_.end() ? -1 : it->second;
}

std::size_t Vocabulary::class_count(Task task) const {
  return task == Task::NAP ? activities_.size() : roles_.size();
}

int Vocabulary::class_id(Task task, const std::string& label) const {
  return task == Task::NAP ? activity_id(label) : role_id(label);
}

const std::string& Vocabulary::class_label(Task task, std::size_t id) const {
  return task == Task::NAP ? activities_.at(id) : roles_.at(id);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Predictor> train_predictor(const PredictorSpec& spec, std::span<const PrefixSample> samples,
                                           const Vocabulary* vocab) {
  std::vector<PrefixSample> defined;
  for (const auto& s : samples) {
    if (s.has_target(spec.task)) defined.push_back(s);
  }
  if (defined.empty()) {
    throw Error(Errc::NoDefinedTargets, std::string("no training samples with a defined ") +
                                            std::string(to_string(spec.task)) + " target");
  }
  if (spec.architecture == Architecture::FreqBaseline) return detail::train_frequency_baseline(spec.task, defined);
  if (vocab != nullptr) return detail::train_mlp(spec, defined, *vocab);
  const std::span<const PrefixSample> sets[] = {defined};
  const Vocabulary own = Vocabulary::fit(sets);
  return detail::train_mlp(spec, defined, own);
}

double evaluate_predictor(const Predictor& model, std::span<const PrefixSample> test_samples) {
  const Task task = model.task();
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& s : test_samples) {
    if (!s.has_target(task)) continue;
    ++n;
    if (is_classification(task)) {
      total += model.predict_label(s) == s.class_target(task) ? 1.0 : 0.0;
    } else {
      total += std::abs(model.predict_minutes(s) - s.regression_target(task));
    }
  }
  if (n == 0) {
    throw Error(Errc::EmptyTestSet, std::string("no test samples with a defined ") + std::string(to_string(task)) +
                                        " target");
  }
  return total / static_cast<double>(n);
}

TaskMetricVector metric_vector(const EventLog& training_log, const EventLog& test_log, const RoleMap& roles,
                               std::uint64_t seed, const MlpHyperparameters& mlp) {
  const auto train = extract_prefix_samples(training_log, roles);
  const auto test = extract_prefix_samples(test_log, roles);
  const std::span<const PrefixSample> sets[] = {train, test};
  const Vocabulary vocab = Vocabulary::fit(sets);

  TaskMetricVector out;
  for (Task task : kTasks) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kArchitectureCount; ++k) {
      PredictorSpec spec;
      spec.architecture = kArchitectures[k];
      spec.task = task;
      spec.seed = seed;
      spec.mlp = mlp;
      const auto model = train_predictor(spec, train, &vocab);
      const double metric = evaluate_predictor(*model, test);
      out.per_architecture[k][task_index(task)] = metric;
      sum += metric;
    }
    out.values[task_index(task)] = sum / static_cast<double>(kArchitectureCount);
  }
  return out;
}

}  // namespace bpseval
