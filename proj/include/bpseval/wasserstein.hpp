#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bpseval {

/// Non-empty sample of finite reals. Construction rejects empty input and NaN/inf.
class Sample1D {
public:
  explicit Sample1D(std::vector<double> values);
  Sample1D(std::initializer_list<double> values) : Sample1D(std::vector<double>(values)) {}

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Non-decreasing copy (stable).
  std::vector<double> sorted() const;

private:
  std::vector<double> values_;
};

/// (1/B) * sum_i |x_(i) - y_(i)| over order statistics. Requires |x| == |y|.
double w1_sorted(const Sample1D& x, const Sample1D& y);

/// Integral over u in [0,1] of |F_x^-1(u) - F_y^-1(u)|, computed exactly on the
/// merged breakpoint grid of both empirical quantile functions. Sizes may differ.
double w1_quantile(const Sample1D& x, const Sample1D& y);

/// Brute force: min over permutations s of (1/n) * sum_i |x_i - y_s(i)|.
/// Requires |x| == |y| <= kAssignmentOracleMax.
double w1_assignment_oracle(const Sample1D& x, const Sample1D& y);

inline constexpr std::size_t kAssignmentOracleMax = 9;

}  // namespace bpseval
