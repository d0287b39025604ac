#include "rfcp/conjugate_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfcp {

MultinomialDirichletModel::MultinomialDirichletModel(std::span<const std::uint8_t> symbols,
                                                     double alpha)
    : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("Dirichlet concentration must be positive and finite");
  }
  log_norm_ = std::lgamma(4.0 * alpha) - 4.0 * std::lgamma(alpha);
  prefix_.resize(symbols.size() + 1);
  prefix_[0] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= kNucleotides) {
      throw std::invalid_argument("symbol code out of range at position " + std::to_string(i + 1));
    }
    prefix_[i + 1] = prefix_[i];
    ++prefix_[i + 1][symbols[i]];
  }
}

std::array<std::uint32_t, kNucleotides> MultinomialDirichletModel::counts(std::size_t t,
                                                                          std::size_t s) const {
  std::array<std::uint32_t, kNucleotides> c{};
  for (std::size_t j = 0; j < kNucleotides; ++j) c[j] = prefix_[s][j] - prefix_[t - 1][j];
  return c;
}

LogWeight MultinomialDirichletModel::log_marginal(std::size_t t, std::size_t s) const {
  if (!check_segment(t, s)) return kLogZero;
  const auto c = counts(t, s);
  double acc = log_norm_ - std::lgamma(static_cast<double>(s - t + 1) + 4.0 * alpha_);
  for (auto nj : c) acc += std::lgamma(static_cast<double>(nj) + alpha_);
  return acc;
}

GaussianConjugateModel::GaussianConjugateModel(std::span<const double> y,
                                               NormalInverseGammaPrior prior)
    : prior_(prior) {
  if (!(prior.kappa > 0.0) || !std::isfinite(prior.kappa)) {
    throw std::invalid_argument("normal-inverse-gamma kappa must be positive and finite");
  }
  if (!(prior.shape > 0.0) || !(prior.rate > 0.0) || !std::isfinite(prior.shape) ||
      !std::isfinite(prior.rate) || !std::isfinite(prior.mean)) {
    throw std::invalid_argument("normal-inverse-gamma shape and rate must be positive and finite");
  }
  // Centre the prefix sums to limit cancellation in the within-segment sum of squares.
  long double mean = 0.0L;
  for (double v : y) mean += v;
  shift_ = y.empty() ? 0.0 : static_cast<double>(mean / static_cast<long double>(y.size()));
  sum_.assign(y.size() + 1, 0.0L);
  sum_sq_.assign(y.size() + 1, 0.0L);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw std::invalid_argument("non-finite observation at position " + std::to_string(i + 1));
    }
    const long double c = static_cast<long double>(y[i]) - shift_;
    sum_[i + 1] = sum_[i] + c;
    sum_sq_[i + 1] = sum_sq_[i] + c * c;
  }
}

LogWeight GaussianConjugateModel::log_marginal(std::size_t t, std::size_t s) const {
  if (!check_segment(t, s)) return kLogZero;
  const double m = static_cast<double>(s - t + 1);
  const long double sc = sum_[s] - sum_[t - 1];
  const long double sq = sum_sq_[s] - sum_sq_[t - 1];
  const double centred_mean = static_cast<double>(sc / m);
  const double ss = std::max(0.0, static_cast<double>(sq - sc * sc / m));
  const double diff = centred_mean + shift_ - prior_.mean;

  const double kappa_n = prior_.kappa + m;
  const double shape_n = prior_.shape + 0.5 * m;
  const double rate_n = prior_.rate + 0.5 * ss + 0.5 * prior_.kappa * m * diff * diff / kappa_n;

  return std::lgamma(shape_n) - std::lgamma(prior_.shape) + prior_.shape * std::log(prior_.rate) -
         shape_n * std::log(rate_n) + 0.5 * (std::log(prior_.kappa) - std::log(kappa_n)) -
         0.5 * m * std::log(2.0 * std::numbers::pi);
}

PoissonGammaModel::PoissonGammaModel(std::span<const double> counts, GammaPrior prior)
    : prior_(prior) {
  if (!(prior.shape > 0.0) || !(prior.rate > 0.0) || !std::isfinite(prior.shape) ||
      !std::isfinite(prior.rate)) {
    throw std::invalid_argument("Gamma prior shape and rate must be positive and finite");
  }
  sum_.assign(counts.size() + 1, 0);
  sum_log_factorial_.assign(counts.size() + 1, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = counts[i];
    if (!(c >= 0.0) || c != std::floor(c) || !std::isfinite(c)) {
      throw std::invalid_argument("count at position " + std::to_string(i + 1) +
                                  " is not a nonnegative integer");
    }
    sum_[i + 1] = sum_[i] + static_cast<std::uint64_t>(c);
    sum_log_factorial_[i + 1] = sum_log_factorial_[i] + std::lgamma(c + 1.0);
  }
}

LogWeight PoissonGammaModel::log_marginal(std::size_t t, std::size_t s) const {
  if (!check_segment(t, s)) return kLogZero;
  const double m = static_cast<double>(s - t + 1);
  const double total = static_cast<double>(sum_[s] - sum_[t - 1]);
  const double a = prior_.shape;
  const double b = prior_.rate;
  return a * std::log(b) - std::lgamma(a) + std::lgamma(a + total) - (a + total) * std::log(b + m) -
         (sum_log_factorial_[s] - sum_log_factorial_[t - 1]);
}

LogWeight multinomial_dirichlet_log_marginal(std::size_t t, std::size_t s,
                                             const MultinomialDirichletModel& model) {
  return model.log_marginal(t, s);
}

LogWeight gaussian_conjugate_log_marginal(std::size_t t, std::size_t s,
                                          const GaussianConjugateModel& model) {
  return model.log_marginal(t, s);
}

LogWeight poisson_gamma_log_marginal(std::size_t t, std::size_t s, const PoissonGammaModel& model) {
  return model.log_marginal(t, s);
}

}  // namespace rfcp
