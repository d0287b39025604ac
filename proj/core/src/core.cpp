#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rfcp/changepoint_prior.hpp"
#include "rfcp/grid.hpp"
#include "rfcp/log_weight.hpp"

namespace rfcp {

LogWeight log_sum_exp(std::span<const LogWeight> values) {
  LogWeight m = kLogZero;
  for (LogWeight v : values) {
    assert(!std::isnan(v));
    m = std::max(m, v);
  }
  if (m == kLogZero) return kLogZero;
  double sum = 0.0;
  for (LogWeight v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

ReducedGrid::ReducedGrid(std::size_t n, std::size_t g) : n_(n), g_(g) {
  if (n < 2) throw std::invalid_argument("reduced grid needs n >= 2, got " + std::to_string(n));
  if (g < 1 || g > n - 1) {
    throw std::invalid_argument("grid spacing must lie in [1, n-1], got g=" + std::to_string(g) +
                                " for n=" + std::to_string(n));
  }
  points_.reserve((n - 1) / g);
  for (std::size_t t = g; t <= n - 1; t += g) points_.push_back(t);
}

std::uint64_t ReducedGrid::reported_evaluation_count() const {
  const std::uint64_t nr = n_ / g_ + 1 - (g_ == 1 ? 1 : 0);
  return nr * (nr + 1) / 2;
}

ReducedGrid build_reduced_grid(std::size_t n, std::size_t g) { return ReducedGrid(n, g); }

LogWeight log_delta(std::size_t s, std::size_t t) {
  if (s >= t) {
    throw std::invalid_argument("log_delta requires s < t (s=" + std::to_string(s) +
                                ", t=" + std::to_string(t) + ")");
  }
  const std::size_t gap = t - s - 1;
  return gap == 0 ? kLogZero : std::log(static_cast<double>(gap));
}

LogWeight log_z_k(std::size_t end, std::size_t k) {
  if (end < 1) return kLogZero;
  const double top = static_cast<double>(end - 1);
  const double choose = static_cast<double>(2 * k + 1);
  if (choose > top) return kLogZero;
  const double j = std::min(choose, top - choose);
  if (j <= 256.0) {
    // Direct product is more accurate than differencing large log-gammas.
    double acc = 0.0;
    for (double i = 1.0; i <= j; i += 1.0) acc += std::log((top - j + i) / i);
    return acc;
  }
  return std::lgamma(top + 1.0) - std::lgamma(choose + 1.0) - std::lgamma(top - choose + 1.0);
}

KPrior KPrior::uniform(std::size_t max_k) {
  std::vector<LogWeight> w(max_k + 1, -std::log(static_cast<double>(max_k + 1)));
  return KPrior(Kind::Uniform, 0.0, std::move(w));
}

KPrior KPrior::poisson(double mean, std::size_t max_k) {
  if (!(mean > 0.0)) throw std::invalid_argument("Poisson prior mean must be positive");
  std::vector<LogWeight> w(max_k + 1);
  for (std::size_t k = 0; k <= max_k; ++k) {
    const double kd = static_cast<double>(k);
    w[k] = kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
  }
  const LogWeight total = log_sum_exp(w);
  for (auto& v : w) v -= total;
  return KPrior(Kind::Poisson, mean, std::move(w));
}

}  // namespace rfcp
