#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfcp/changepoint_prior.hpp"
#include "rfcp/segment_table.hpp"

namespace rfcp {

/// Backward quantities B_m(r) = log p(y_{t_r+1:n} | changepoint at t_r, m more
/// changepoints after it), for m in [0, K-1] and grid index r in [1, N].
///
/// Under the order-statistics prior these values do not depend on the total
/// number of changepoints, so one table serves every k <= K.
class RecursionTable {
 public:
  RecursionTable(std::size_t max_k, std::size_t grid_size);

  std::size_t max_k() const { return max_k_; }
  std::size_t grid_size() const { return n_; }

  LogWeight at(std::size_t m, std::size_t r) const { return values_[m * (n_ + 2) + r]; }
  LogWeight& at(std::size_t m, std::size_t r) { return values_[m * (n_ + 2) + r]; }

 private:
  std::size_t max_k_;
  std::size_t n_;
  std::vector<LogWeight> values_;
};

RecursionTable backward_recursions(const SegmentTable& table, std::size_t max_k);

/// log p(y | k changepoints); k = 0 is log P(1, n). Log-zero when Z_k = 0.
LogWeight log_marginal_given_k(const RecursionTable& b, const SegmentTable& table, std::size_t k);

/// Posterior over k from per-k log marginals and the prior on k.
/// Throws if every entry has zero mass.
std::vector<double> posterior_over_k(std::span<const LogWeight> log_marginals, const KPrior& prior);

/// Normalised distribution of the j-th changepoint's grid index given the
/// previous one (`prev`, 0 for j = 1) under a k-changepoint model. Entry c
/// of the result is the probability of grid index c (entries <= prev are 0).
std::vector<double> conditional_distribution(const RecursionTable& b, const SegmentTable& table,
                                             std::size_t k, std::size_t j, std::size_t prev);

/// Greedy sequential argmax of the conditional distributions; ties go to the
/// smallest index. Returns grid indices c_1 < ... < c_k.
std::vector<std::size_t> map_positions(const RecursionTable& b, const SegmentTable& table,
                                       std::size_t k);

struct RefineOptions {
  std::size_t max_sweeps = 10;
};

struct RefineResult {
  std::vector<std::size_t> positions;
  std::size_t sweeps = 0;
  std::vector<double> objective;  // sum of segment log marginals before each sweep and at the end
};

/// Coordinate-wise refinement of changepoint times within +-(g-1) of their
/// starting values, maximising log P(prev+1, tau) + log P(tau+1, next) for one
/// changepoint at a time, left to right, until a sweep changes nothing.
RefineResult refine_positions(std::span<const std::size_t> times, std::size_t g,
                              const SegmentModel& model, const RefineOptions& options = {});

/// Forward simulation of grid indices from the exact conditional
/// distributions. Reproducible for a given seed.
std::vector<std::vector<std::size_t>> sample_positions(const RecursionTable& b,
                                                       const SegmentTable& table, std::size_t k,
                                                       std::uint64_t seed, std::size_t count);

/// exp(a - b) for two finite log marginals.
double bayes_factor(LogWeight log_marginal_a, LogWeight log_marginal_b);
LogWeight log_bayes_factor(LogWeight log_marginal_a, LogWeight log_marginal_b);

}  // namespace rfcp
