#pragma once

#include <optional>
#include <span>
#include <vector>

namespace rfcp::gmrf {

/// Symmetric matrix that is tridiagonal in its leading m x m block, optionally
/// bordered by one dense row/column (an "arrowhead").
struct ArrowMatrix {
  std::vector<double> diag;    // m
  std::vector<double> off;     // m - 1, sub/super diagonal
  std::vector<double> border;  // m, or empty when there is no border
  double corner = 0.0;

  std::size_t dim() const { return diag.size() + (border.empty() ? 0 : 1); }
  bool has_border() const { return !border.empty(); }

  /// y = M x.
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Cholesky factor of an ArrowMatrix via the tridiagonal block and its Schur
/// complement. O(m) to factor and to solve.
class ArrowCholesky {
 public:
  /// Returns nullopt if the matrix is not numerically positive definite.
  static std::optional<ArrowCholesky> factor(const ArrowMatrix& m);

  /// Factors `m` into this object's storage; false if not positive definite.
  bool refactor(const ArrowMatrix& m);

  double log_det() const;
  std::size_t dim() const { return inv_d_.size() + (border_.empty() ? 0 : 1); }

  /// Solves M z = r (r and z may alias).
  void solve(std::span<const double> r, std::span<double> z) const;

 private:
  void tridiag_solve(std::span<const double> r, std::span<double> v) const;

  std::vector<double> inv_d_;
  std::vector<double> l_sub_;
  std::vector<double> border_;
  std::vector<double> border_solved_;  // A^{-1} b
  double schur_ = 0.0;
};

}  // namespace rfcp::gmrf
