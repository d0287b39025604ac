#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rfcp {

/// Candidate changepoint locations t_1 < ... < t_N, t_i = i*g, restricted to
/// [1, n-1]. Grid index 0 is the sentinel t_0 = 0 and index N+1 the sentinel
/// t_{N+1} = n, so time(r) is defined for r in [0, N+1].
class ReducedGrid {
 public:
  ReducedGrid(std::size_t n, std::size_t g);

  std::size_t n() const { return n_; }
  std::size_t spacing() const { return g_; }
  /// Number of interior points N.
  std::size_t size() const { return points_.size(); }
  const std::vector<std::size_t>& points() const { return points_; }

  /// Time index of grid position r (0 and N+1 are the sentinels).
  std::size_t time(std::size_t r) const {
    if (r == 0) return 0;
    if (r > points_.size()) return n_;
    return points_[r - 1];
  }

  /// Segment evaluation count n_r(n_r+1)/2 with n_r = floor(n/g + 1 - [g == 1]).
  /// Reported for comparison with published figures; the table itself stores
  /// (N+2)(N+1)/2 entries.
  std::uint64_t reported_evaluation_count() const;

  /// Number of (r, s) pairs with 0 <= r < s <= N+1.
  std::uint64_t pair_count() const {
    const std::uint64_t m = points_.size() + 2;
    return m * (m - 1) / 2;
  }

 private:
  std::size_t n_;
  std::size_t g_;
  std::vector<std::size_t> points_;
};

ReducedGrid build_reduced_grid(std::size_t n, std::size_t g);

}  // namespace rfcp
