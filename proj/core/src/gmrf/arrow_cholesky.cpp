#include "rfcp/gmrf/arrow_cholesky.hpp"

#include <cassert>
#include <cmath>

namespace rfcp::gmrf {

void ArrowMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = diag.size();
  assert(x.size() == dim() && y.size() == dim());
  for (std::size_t i = 0; i < m; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < m) acc += off[i] * x[i + 1];
    if (has_border()) acc += border[i] * x[m];
    y[i] = acc;
  }
  if (has_border()) {
    double acc = corner * x[m];
    for (std::size_t i = 0; i < m; ++i) acc += border[i] * x[i];
    y[m] = acc;
  }
}

std::optional<ArrowCholesky> ArrowCholesky::factor(const ArrowMatrix& a) {
  ArrowCholesky c;
  if (!c.refactor(a)) return std::nullopt;
  return c;
}

bool ArrowCholesky::refactor(const ArrowMatrix& a) {
  // LDL^T of the tridiagonal block: L unit lower bidiagonal with subdiagonal
  // l_sub_, D stored as reciprocals so that solves avoid division.
  ArrowCholesky& c = *this;
  const std::size_t m = a.diag.size();
  c.inv_d_.resize(m);
  c.l_sub_.resize(m);
  if (m > 0) c.l_sub_[0] = 0.0;
  double prev_inv = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double d = a.diag[i];
    if (i > 0) {
      const double l = a.off[i - 1] * prev_inv;
      c.l_sub_[i] = l;
      d -= l * a.off[i - 1];
    }
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    prev_inv = 1.0 / d;
    c.inv_d_[i] = prev_inv;
  }
  if (a.has_border()) {
    c.border_.assign(a.border.begin(), a.border.end());
    c.border_solved_.resize(m);
    c.tridiag_solve(c.border_, c.border_solved_);
    double s = a.corner;
    for (std::size_t i = 0; i < m; ++i) s -= c.border_[i] * c.border_solved_[i];
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    c.schur_ = s;
  } else {
    c.border_.clear();
    c.border_solved_.clear();
  }
  return true;
}

double ArrowCholesky::log_det() const {
  double acc = 0.0;
  for (double inv : inv_d_) acc -= std::log(inv);
  if (!border_.empty()) acc += std::log(schur_);
  return acc;
}

void ArrowCholesky::tridiag_solve(std::span<const double> r, std::span<double> v) const {
  const std::size_t m = inv_d_.size();
  if (m == 0) return;
  v[0] = r[0];
  for (std::size_t i = 1; i < m; ++i) v[i] = r[i] - l_sub_[i] * v[i - 1];
  v[m - 1] *= inv_d_[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) v[i] = v[i] * inv_d_[i] - l_sub_[i + 1] * v[i + 1];
}

void ArrowCholesky::solve(std::span<const double> r, std::span<double> z) const {
  const std::size_t m = inv_d_.size();
  assert(r.size() == dim() && z.size() == dim());
  if (border_.empty()) {
    tridiag_solve(r.first(m), z.first(m));
    return;
  }
  const double r_last = r[m];
  tridiag_solve(r.first(m), z.first(m));
  double acc = r_last;
  for (std::size_t i = 0; i < m; ++i) acc -= border_[i] * z[i];
  const double z_last = acc / schur_;
  for (std::size_t i = 0; i < m; ++i) z[i] -= border_solved_[i] * z_last;
  z[m] = z_last;
}

}  // namespace rfcp::gmrf
