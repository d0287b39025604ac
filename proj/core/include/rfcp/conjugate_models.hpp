#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfcp/segment_model.hpp"

namespace rfcp {

/// Nucleotide symbols are encoded A=0, C=1, G=2, T=3.
inline constexpr std::size_t kNucleotides = 4;

/// i.i.d. categorical data on four symbols with a symmetric Dirichlet(alpha)
/// prior on the segment frequencies.
class MultinomialDirichletModel final : public SegmentModel {
 public:
  MultinomialDirichletModel(std::span<const std::uint8_t> symbols, double alpha);

  std::size_t size() const override { return prefix_.size() - 1; }
  std::size_t min_segment_len() const override { return 1; }
  LogWeight log_marginal(std::size_t t, std::size_t s) const override;
  std::string name() const override { return "multinomial_dirichlet"; }

  double alpha() const { return alpha_; }
  /// Symbol counts in y_t..y_s.
  std::array<std::uint32_t, kNucleotides> counts(std::size_t t, std::size_t s) const;

 private:
  double alpha_;
  double log_norm_;  // lgamma(4a) - 4 lgamma(a)
  std::vector<std::array<std::uint32_t, kNucleotides>> prefix_;
};

struct NormalInverseGammaPrior {
  double mean = 0.0;
  double kappa = 1.0;  // prior precision scale on the mean
  double shape = 1.0;
  double rate = 1.0;
};

/// i.i.d. Gaussian data with unknown mean and variance under a
/// normal-inverse-gamma prior.
class GaussianConjugateModel final : public SegmentModel {
 public:
  GaussianConjugateModel(std::span<const double> y, NormalInverseGammaPrior prior);

  std::size_t size() const override { return sum_.size() - 1; }
  std::size_t min_segment_len() const override { return 1; }
  LogWeight log_marginal(std::size_t t, std::size_t s) const override;
  std::string name() const override { return "gaussian_conjugate"; }

  const NormalInverseGammaPrior& prior() const { return prior_; }

 private:
  NormalInverseGammaPrior prior_;
  double shift_;
  // Prefix sums of (y - shift) and (y - shift)^2.
  std::vector<long double> sum_;
  std::vector<long double> sum_sq_;
};

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

/// Poisson counts with a Gamma(shape, rate) prior on the segment rate.
class PoissonGammaModel final : public SegmentModel {
 public:
  PoissonGammaModel(std::span<const double> counts, GammaPrior prior);

  std::size_t size() const override { return sum_.size() - 1; }
  std::size_t min_segment_len() const override { return 1; }
  LogWeight log_marginal(std::size_t t, std::size_t s) const override;
  std::string name() const override { return "poisson_gamma"; }

  const GammaPrior& prior() const { return prior_; }

 private:
  GammaPrior prior_;
  std::vector<std::uint64_t> sum_;
  std::vector<double> sum_log_factorial_;
};

LogWeight multinomial_dirichlet_log_marginal(std::size_t t, std::size_t s,
                                             const MultinomialDirichletModel& model);
LogWeight gaussian_conjugate_log_marginal(std::size_t t, std::size_t s,
                                          const GaussianConjugateModel& model);
LogWeight poisson_gamma_log_marginal(std::size_t t, std::size_t s, const PoissonGammaModel& model);

}  // namespace rfcp
