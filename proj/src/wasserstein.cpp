#include "bpseval/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "bpseval/error.hpp"

namespace bpseval {

Sample1D::Sample1D(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::EmptySample, "sample must be non-empty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "sample contains a non-finite value");
  }
}

std::vector<double> Sample1D::sorted() const {
  std::vector<double> out = values_;
  std::stable_sort(out.begin(), out.end());
  return out;
}

double w1_sorted(const Sample1D& x, const Sample1D& y) {
  if (x.size() != y.size()) {
    throw Error(Errc::LengthMismatch,
                "w1_sorted needs equal sizes, got " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  const auto xs = x.sorted();
  const auto ys = y.sorted();
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += std::abs(xs[i] - ys[i]);
  return sum / static_cast<double>(xs.size());
}

double w1_quantile(const Sample1D& x, const Sample1D& y) {
  const auto xs = x.sorted();
  const auto ys = y.sorted();
  const auto n = static_cast<std::int64_t>(xs.size());
  const auto m = static_cast<std::int64_t>(ys.size());

  // Breakpoints of F_x^-1 sit at multiples of m and those of F_y^-1 at multiples
  // of n on the integer grid 0..n*m; between them both quantiles are constant.
  std::int64_t i = 0, j = 0, pos = 0;
  double sum = 0.0;
  while (i < n && j < m) {
    const std::int64_t next = std::min((i + 1) * m, (j + 1) * n);
    sum += std::abs(xs[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(j)]) *
           static_cast<double>(next - pos);
    pos = next;
    if (next == (i + 1) * m) ++i;
    if (next == (j + 1) * n) ++j;
  }
  return sum / (static_cast<double>(n) * static_cast<double>(m));
}

double w1_assignment_oracle(const Sample1D& x, const Sample1D& y) {
  if (x.size() != y.size()) {
    throw Error(Errc::LengthMismatch, "assignment oracle needs equal sizes");
  }
  if (x.size() > kAssignmentOracleMax) {
    throw Error(Errc::TooLarge, "assignment oracle limited to n <= " + std::to_string(kAssignmentOracleMax));
  }
  const auto xv = x.values();
  const auto yv = y.values();
  std::vector<std::size_t> perm(xv.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) sum += std::abs(xv[i] - yv[perm[i]]);
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(xv.size());
}

}  // namespace bpseval
