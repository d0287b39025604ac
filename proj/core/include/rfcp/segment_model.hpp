#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "rfcp/log_weight.hpp"

namespace rfcp {

/// Source of segment log marginal likelihoods log P(t, s) = log p(y_t, ..., y_s).
///
/// Indices are 1-based and inclusive: 1 <= t <= s <= size(). Implementations
/// must be deterministic and safe to call concurrently. Segments shorter than
/// min_segment_len() have marginal log-zero.
class SegmentModel {
 public:
  virtual ~SegmentModel() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t min_segment_len() const = 0;
  virtual LogWeight log_marginal(std::size_t t, std::size_t s) const = 0;
  virtual std::string name() const = 0;

 protected:
  /// Throws on out-of-range indices; returns false if the segment is too short
  /// to carry mass.
  bool check_segment(std::size_t t, std::size_t s) const {
    if (t < 1 || s < t || s > size()) {
      throw std::invalid_argument("segment [" + std::to_string(t) + ", " + std::to_string(s) +
                                  "] outside [1, " + std::to_string(size()) + "]");
    }
    return s - t + 1 >= min_segment_len();
  }
};

}  // namespace rfcp
