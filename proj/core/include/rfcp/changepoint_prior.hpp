#pragma once

#include <cstddef>
#include <vector>

#include "rfcp/log_weight.hpp"

namespace rfcp {

// Order-statistics changepoint prior: k changepoints are the even-numbered
// order statistics of 2k+1 draws without replacement from {1, ..., end-1}.
// The pairwise weight between consecutive changepoints s < t is t - s - 1 and
// the normaliser is C(end-1, 2k+1), where `end` is the terminal sentinel
// (n on the full time axis, N+1 on a reduced grid).

/// log(t - s - 1); log-zero for adjacent positions. Throws if s >= t.
LogWeight log_delta(std::size_t s, std::size_t t);

/// log C(end - 1, 2k + 1), or log-zero when 2k+1 > end-1.
LogWeight log_z_k(std::size_t end, std::size_t k);

/// Prior on the number of changepoints over {0, ..., K}.
class KPrior {
 public:
  static KPrior uniform(std::size_t max_k);
  /// Poisson(mean) truncated to {0, ..., max_k} and renormalised.
  static KPrior poisson(double mean, std::size_t max_k);

  std::size_t max_k() const { return log_weights_.size() - 1; }
  const std::vector<LogWeight>& log_weights() const { return log_weights_; }
  LogWeight log_weight(std::size_t k) const { return log_weights_.at(k); }

  enum class Kind { Uniform, Poisson };
  Kind kind() const { return kind_; }
  double mean() const { return mean_; }

 private:
  KPrior(Kind kind, double mean, std::vector<LogWeight> w)
      : kind_(kind), mean_(mean), log_weights_(std::move(w)) {}

  Kind kind_;
  double mean_;
  std::vector<LogWeight> log_weights_;
};

}  // namespace rfcp
