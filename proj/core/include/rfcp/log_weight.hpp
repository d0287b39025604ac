#pragma once

#include <cassert>
#include <cmath>
#include <limits>
#include <span>

namespace rfcp {

/// Log of a nonnegative quantity. Negative infinity encodes zero; NaN is never valid.
using LogWeight = double;

inline constexpr LogWeight kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(LogWeight v) { return v == kLogZero; }

/// log(e^a + e^b), tolerant of either side being log-zero.
inline LogWeight log_add(LogWeight a, LogWeight b) {
  assert(!std::isnan(a) && !std::isnan(b));
  if (a < b) std::swap(a, b);
  if (a == kLogZero) return kLogZero;
  return a + std::log1p(std::exp(b - a));
}

/// log(sum exp(v_i)). Empty input gives log-zero.
LogWeight log_sum_exp(std::span<const LogWeight> values);

/// log(x) with log(0) mapped to log-zero instead of raising.
inline LogWeight log_of(double x) {
  assert(x >= 0.0);
  return x > 0.0 ? std::log(x) : kLogZero;
}

/// Streaming log-sum-exp accumulator. Keeps a running maximum so that adding
/// many terms never overflows.
class LogSumAccumulator {
 public:
  void add(LogWeight v) {
    assert(!std::isnan(v));
    if (v == kLogZero) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }

  LogWeight value() const { return max_ == kLogZero ? kLogZero : max_ + std::log(sum_); }

 private:
  LogWeight max_ = kLogZero;
  double sum_ = 0.0;
};

}  // namespace rfcp
