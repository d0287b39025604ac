#pragma once

#include <cstddef>
#include <vector>

#include "rfcp/grid.hpp"
#include "rfcp/log_weight.hpp"
#include "rfcp/segment_model.hpp"

namespace rfcp {

/// Upper-triangular cache of log P(t_r + 1, t_s) for grid indices
/// 0 <= r < s <= N + 1, where t_0 = 0 and t_{N+1} = n.
class SegmentTable {
 public:
  /// Evaluates every entry with `workers` threads. Content does not depend on
  /// the worker count.
  static SegmentTable fill(const SegmentModel& model, const ReducedGrid& grid,
                           std::size_t workers = 1);

  const ReducedGrid& grid() const { return grid_; }

  LogWeight at(std::size_t r, std::size_t s) const { return values_[index(r, s)]; }
  /// Entries of row r, i.e. at(r, r+1), ..., at(r, N+1).
  const LogWeight* row(std::size_t r) const { return values_.data() + offsets_[r]; }

  std::size_t entry_count() const { return values_.size(); }
  /// Entries that came back log-zero although the segment met the model's
  /// minimum length.
  std::size_t failed_entries() const { return failed_entries_; }
  const std::vector<LogWeight>& values() const { return values_; }

  /// Table for spacing factor * g over the same data, reusing the entries of
  /// this one (every coarse grid point is also a point of this grid).
  SegmentTable coarsen(std::size_t factor) const;

 private:
  explicit SegmentTable(ReducedGrid grid);
  std::size_t index(std::size_t r, std::size_t s) const { return offsets_[r] + (s - r - 1); }

  ReducedGrid grid_;
  std::vector<std::size_t> offsets_;
  std::vector<LogWeight> values_;
  std::size_t failed_entries_ = 0;
  std::size_t min_len_ = 1;
};

}  // namespace rfcp
