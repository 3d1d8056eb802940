#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

namespace colbandit {

/// Running statistics over the observed cells of one row.
///
/// Mean and M2 follow Welford's one-pass update; the plain running sum is
/// kept separately because the estimated score is defined on it.
class RowStats {
 public:
  void push(double x) noexcept {
    ++n_;
    sum_ += x;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::size_t count() const noexcept { return n_; }
  double sum() const noexcept { return sum_; }

  /// Undefined when nothing is observed.
  std::optional<double> mean() const {
    if (n_ == 0) return std::nullopt;
    return sum_ / static_cast<double>(n_);
  }

  /// Unbiased (n - 1 divisor); undefined for n <= 1.
  std::optional<double> sample_variance() const {
    if (n_ < 2) return std::nullopt;
    return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
  }

 private:
  std::size_t n_ = 0;
  double sum_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace colbandit
