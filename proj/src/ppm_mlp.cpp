#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "bpseval/error.hpp"
#include "bpseval/rng.hpp"
#include "ppm_internal.hpp"

namespace bpseval::detail {

namespace {

constexpr std::size_t kDense = 5;  // elapsed, sin/cos hour, sin/cos weekday
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

struct Encoded {
  std::vector<std::size_t> active;  // one-hot input positions
  std::array<double, kDense> dense{};
};

struct Param {
  std::vector<double> w, grad, m, v;

  explicit Param(std::size_t n = 0) : w(n, 0.0), grad(n, 0.0), m(n, 0.0), v(n, 0.0) {}

  void adam_step(double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double g = grad[i];
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
      w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
      grad[i] = 0.0;
    }
  }
};

class Mlp final : public Predictor {
public:
  Mlp(const PredictorSpec& spec, std::span<const PrefixSample> samples, const Vocabulary& vocab)
      : task_(spec.task), vocab_(vocab), hidden_(std::max<std::size_t>(1, spec.mlp.hidden_units)) {
    one_hot_ = kWindowSize * (vocab_.activity_count() + vocab_.role_count());
    inputs_ = one_hot_ + kDense;
    outputs_ = is_classification(task_) ? vocab_.class_count(task_) : 1;

    fit_feature_scaling(samples);
    std::vector<Encoded> xs;
    xs.reserve(samples.size());
    for (const auto& s : samples) xs.push_back(encode(s));

    std::vector<double> ys(samples.size());
    if (is_classification(task_)) {
      allowed_.assign(outputs_, false);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const int id = vocab_.class_id(task_, samples[i].class_target(task_));
        if (id < 0) throw Error(Errc::InvalidArgument, "training label missing from the vocabulary");
        ys[i] = id;
        allowed_[static_cast<std::size_t>(id)] = true;
      }
    } else {
      fit_target_scaling(samples);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        ys[i] = (std::log1p(samples[i].regression_target(task_)) - y_mean_) / y_std_;
      }
    }

    initialise(spec.seed);
    train(xs, ys, spec);
  }

  Task task() const override { return task_; }

  std::string predict_label(const PrefixSample& s) const override {
    std::vector<double> h, out;
    forward(encode(s), h, out);
    std::size_t best = outputs_;
    for (std::size_t k = 0; k < outputs_; ++k) {
      if (allowed_[k] && (best == outputs_ || out[k] > out[best])) best = k;
    }
    return vocab_.class_label(task_, best);
  }

  double predict_minutes(const PrefixSample& s) const override {
    std::vector<double> h, out;
    forward(encode(s), h, out);
    const double minutes = std::expm1(out[0] * y_std_ + y_mean_);
    return std::isfinite(minutes) ? std::max(0.0, minutes) : 0.0;
  }

private:
  void fit_feature_scaling(std::span<const PrefixSample> samples) {
    double sum = 0.0, sq = 0.0;
    for (const auto& s : samples) sum += s.elapsed_log1p;
    elapsed_mean_ = sum / static_cast<double>(samples.size());
    for (const auto& s : samples) sq += (s.elapsed_log1p - elapsed_mean_) * (s.elapsed_log1p - elapsed_mean_);
    elapsed_std_ = std::sqrt(sq / static_cast<double>(samples.size()));
    if (!(elapsed_std_ > 1e-12)) elapsed_std_ = 1.0;
  }

  void fit_target_scaling(std::span<const PrefixSample> samples) {
    double sum = 0.0, sq = 0.0;
    for (const auto& s : samples) sum += std::log1p(s.regression_target(task_));
    y_mean_ = sum / static_cast<double>(samples.size());
    for (const auto& s : samples) {
      const double d = std::log1p(s.regression_target(task_)) - y_mean_;
      sq += d * d;
    }
    y_std_ = std::sqrt(sq / static_cast<double>(samples.size()));
    if (!(y_std_ > 1e-12)) y_std_ = 1.0;
  }

  Encoded encode(const PrefixSample& s) const {
    Encoded e;
    e.active.reserve(2 * kWindowSize);
    const std::size_t na = vocab_.activity_count(), nr = vocab_.role_count();
    for (std::size_t w = 0; w < kWindowSize; ++w) {
      const int a = vocab_.activity_id(s.activity_window[w]);
      if (a >= 0) e.active.push_back(w * na + static_cast<std::size_t>(a));
      const int r = vocab_.role_id(s.role_window[w]);
      if (r >= 0) e.active.push_back(kWindowSize * na + w * nr + static_cast<std::size_t>(r));
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    e.dense[0] = (s.elapsed_log1p - elapsed_mean_) / elapsed_std_;
    e.dense[1] = std::sin(two_pi * s.hour_of_day / 24.0);
    e.dense[2] = std::cos(two_pi * s.hour_of_day / 24.0);
    e.dense[3] = std::sin(two_pi * s.weekday / 7.0);
    e.dense[4] = std::cos(two_pi * s.weekday / 7.0);
    return e;
  }

  void initialise(std::uint64_t seed) {
    Stream rng(seed, task_index(task_), StreamTag::MlpInit);
    w1_ = Param(inputs_ * hidden_);
    b1_ = Param(hidden_);
    w2_ = Param(hidden_ * outputs_);
    b2_ = Param(outputs_);
    // Xavier-uniform.
    const double l1 = std::sqrt(6.0 / static_cast<double>(inputs_ + hidden_));
    for (auto& w : w1_.w) w = (2.0 * rng.uniform() - 1.0) * l1;
    const double l2 = std::sqrt(6.0 / static_cast<double>(hidden_ + outputs_));
    for (auto& w : w2_.w) w = (2.0 * rng.uniform() - 1.0) * l2;
  }

  void forward(const Encoded& x, std::vector<double>& h, std::vector<double>& out) const {
    h.assign(b1_.w.begin(), b1_.w.end());
    for (std::size_t idx : x.active) {
      const double* row = &w1_.w[idx * hidden_];
      for (std::size_t j = 0; j < hidden_; ++j) h[j] += row[j];
    }
    for (std::size_t d = 0; d < kDense; ++d) {
      const double* row = &w1_.w[(one_hot_ + d) * hidden_];
      for (std::size_t j = 0; j < hidden_; ++j) h[j] += x.dense[d] * row[j];
    }
    for (auto& v : h) v = std::tanh(v);
    out.assign(b2_.w.begin(), b2_.w.end());
    for (std::size_t j = 0; j < hidden_; ++j) {
      const double* row = &w2_.w[j * outputs_];
      for (std::size_t k = 0; k < outputs_; ++k) out[k] += h[j] * row[k];
    }
  }

  // Writes dLoss/dOutput into `out` in place.
  void output_gradient(std::vector<double>& out, double y) const {
    if (!is_classification(task_)) {
      out[0] -= y;
      return;
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < outputs_; ++k) {
      if (allowed_[k]) mx = std::max(mx, out[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < outputs_; ++k) {
      out[k] = allowed_[k] ? std::exp(out[k] - mx) : 0.0;
      z += out[k];
    }
    for (auto& p : out) p /= z;
    out[static_cast<std::size_t>(y)] -= 1.0;
  }

  void train(const std::vector<Encoded>& xs, const std::vector<double>& ys, const PredictorSpec& spec) {
    Stream shuffle(spec.seed, task_index(task_), StreamTag::MlpShuffle);
    std::vector<std::size_t> order(xs.size());
    const std::size_t batch = std::max<std::size_t>(1, spec.mlp.batch_size);
    std::vector<double> h, out, dh(hidden_);
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < spec.mlp.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

      for (std::size_t lo = 0; lo < order.size(); lo += batch) {
        const std::size_t hi = std::min(order.size(), lo + batch);
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (std::size_t b = lo; b < hi; ++b) {
          const Encoded& x = xs[order[b]];
          forward(x, h, out);
          output_gradient(out, ys[order[b]]);
          for (auto& g : out) g *= inv;

          std::fill(dh.begin(), dh.end(), 0.0);
          for (std::size_t j = 0; j < hidden_; ++j) {
            const double* row = &w2_.w[j * outputs_];
            double* grow = &w2_.grad[j * outputs_];
            for (std::size_t k = 0; k < outputs_; ++k) {
              grow[k] += h[j] * out[k];
              dh[j] += row[k] * out[k];
            }
          }
          for (std::size_t k = 0; k < outputs_; ++k) b2_.grad[k] += out[k];
          for (std::size_t j = 0; j < hidden_; ++j) dh[j] *= 1.0 - h[j] * h[j];

          for (std::size_t idx : x.active) {
            double* grow = &w1_.grad[idx * hidden_];
            for (std::size_t j = 0; j < hidden_; ++j) grow[j] += dh[j];
          }
          for (std::size_t d = 0; d < kDense; ++d) {
            double* grow = &w1_.grad[(one_hot_ + d) * hidden_];
            for (std::size_t j = 0; j < hidden_; ++j) grow[j] += x.dense[d] * dh[j];
          }
          for (std::size_t j = 0; j < hidden_; ++j) b1_.grad[j] += dh[j];
        }
        ++step;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (Param* p : {&w1_, &b1_, &w2_, &b2_}) p->adam_step(spec.mlp.step_size, bc1, bc2);
      }
    }
  }

  Task task_;
  Vocabulary vocab_;
  std::size_t hidden_;
  std::size_t one_hot_ = 0, inputs_ = 0, outputs_ = 0;
  std::vector<bool> allowed_;
  double elapsed_mean_ = 0.0, elapsed_std_ = 1.0;
  double y_mean_ = 0.0, y_std_ = 1.0;
  Param w1_, b1_, w2_, b2_;
};

}  // namespace

std::unique_ptr<Predictor> train_mlp(const PredictorSpec& spec, std::span<const PrefixSample> samples,
                                     const Vocabulary& vocab) {
  return std::make_unique<Mlp>(spec, samples, vocab);
}

}  // namespace bpseval::detail
