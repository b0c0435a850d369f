#include <algorithm>
#include <map>
#include <numeric>

#include "ppm_internal.hpp"

namespace bpseval::detail {

namespace {

constexpr std::size_t kMaxOrder = 3;

using Counts = std::map<std::string, std::size_t>;

std::string context_key(const PrefixSample& s, std::size_t order) {
  std::string key;
  for (std::size_t i = kWindowSize - order; i < kWindowSize; ++i) {
    key += s.activity_window[i];
    key += '\x1f';
  }
  return key;
}

// Sum in sorted order so the result does not depend on sample order.
double stable_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

class FrequencyClassifier final : public Predictor {
public:
  FrequencyClassifier(Task task, std::span<const PrefixSample> samples) : task_(task) {
    for (const auto& s : samples) {
      const auto& label = s.class_target(task);
      classes_.insert(label);
      ++global_[label];
      for (std::size_t order = 1; order <= kMaxOrder; ++order) ++tables_[order - 1][context_key(s, order)][label];
    }
    majority_ = argmax(global_);
  }

  Task task() const override { return task_; }

  std::string predict_label(const PrefixSample& s) const override {
    for (std::size_t order = kMaxOrder; order >= 1; --order) {
      const auto& table = tables_[order - 1];
      auto it = table.find(context_key(s, order));
      if (it != table.end()) return argmax_smoothed(it->second);
    }
    return majority_;
  }

  double predict_minutes(const PrefixSample&) const override { return 0.0; }

private:
  static std::string argmax(const Counts& c) {
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [label, n] : c) {
      if (n > best_n) best = label, best_n = n;
    }
    return best;
  }

  // Add-one smoothing over every training class; the map iterates labels in
  // lexicographic order so ties go to the smallest label.
  std::string argmax_smoothed(const Counts& c) const {
    std::string best;
    double best_p = -1.0;
    const double denom = static_cast<double>(
        std::accumulate(c.begin(), c.end(), std::size_t{0}, [](std::size_t a, const auto& kv) { return a + kv.second; }) +
        classes_.size());
    for (const auto& label : classes_) {
      auto it = c.find(label);
      const double p = (static_cast<double>(it == c.end() ? 0 : it->second) + 1.0) / denom;
      if (p > best_p) best = label, best_p = p;
    }
    return best;
  }

  Task task_;
  std::set<std::string> classes_;
  Counts global_;
  std::array<std::map<std::string, Counts>, kMaxOrder> tables_;
  std::string majority_;
};

class FrequencyRegressor final : public Predictor {
public:
  FrequencyRegressor(Task task, std::span<const PrefixSample> samples) : task_(task) {
    std::map<std::string, std::vector<double>> by_activity;
    std::vector<double> all;
    for (const auto& s : samples) {
      const double y = s.regression_target(task);
      by_activity[s.current_activity()].push_back(y);
      all.push_back(y);
    }
    for (auto& [a, v] : by_activity) means_[a] = stable_mean(std::move(v));
    global_mean_ = stable_mean(std::move(all));
  }

  Task task() const override { return task_; }
  std::string predict_label(const PrefixSample&) const override { return {}; }

  double predict_minutes(const PrefixSample& s) const override {
    auto it = means_.find(s.current_activity());
    return std::max(0.0, it == means_.end() ? global_mean_ : it->second);
  }

private:
  Task task_;
  std::map<std::string, double> means_;
  double global_mean_ = 0.0;
};

}  // namespace

std::unique_ptr<Predictor> train_frequency_baseline(Task task, std::span<const PrefixSample> samples) {
  if (is_classification(task)) return std::make_unique<FrequencyClassifier>(task, samples);
  return std::make_unique<FrequencyRegressor>(task, samples);
}

}  // namespace bpseval::detail
