#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rfcp/gmrf/arrow_cholesky.hpp"
#include "rfcp/gmrf/specs.hpp"
#include "rfcp/log_weight.hpp"

namespace rfcp::gmrf {

/// Values of the hyperparameters at one grid node (natural scale).
struct HyperPoint {
  double latent_precision = 1.0;  // sigma_x^{-2}
  double phi = 0.0;               // AR1 persistence
  double obs_precision = 1.0;     // sigma_y^{-2}, GaussianIdentity only
};

/// Log-likelihood of one observation and its first two derivatives with
/// respect to the linear predictor eta. neg_hess is -d^2 loglik / d eta^2.
struct ObsTerms {
  double loglik;
  double grad;
  double neg_hess;
};

/// eta is the linear predictor: the latent value plus any intercept.
ObsTerms obs_terms(ObsKind kind, double y, double eta, double obs_precision);

/// Stationary AR(1) log density of x with persistence phi and innovation
/// variance sigma2, evaluated through its tridiagonal precision.
LogWeight ar1_log_prior(std::span<const double> x, double phi, double innovation_variance);

struct TridiagonalPrecision {
  std::vector<double> diag;
  std::vector<double> off;
  double log_det = 0.0;
};

/// Precision of a length-m stationary AR(1) with innovation precision tau.
TridiagonalPrecision ar1_precision(std::size_t m, double phi, double tau);
/// Precision of the latent block described by `latent` at `hyper`.
TridiagonalPrecision latent_precision(const LatentSpec& latent, std::size_t m,
                                      const HyperPoint& hyper);

struct NewtonOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
  int max_halvings = 40;
};

/// Gaussian approximation of p(x | y, theta) at its mode. The mode holds the
/// latent block followed by the intercept when one is present.
struct GaussianApprox {
  std::vector<double> mode;
  ArrowMatrix precision;
  double log_det_precision = 0.0;
  double log_lik = 0.0;          // sum of observation log-likelihoods at the mode
  double log_prior_kernel = 0.0; // -1/2 z'Qz-type quadratic prior terms at the mode
  double log_det_prior = 0.0;    // log det of the prior precision (latent + intercept)
  double gradient_norm = 0.0;    // sup-norm of the gradient at the returned mode
  int iterations = 0;
  bool converged = false;

  std::size_t latent_size() const { return precision.diag.size(); }
  bool has_intercept() const { return precision.has_border(); }
  double intercept() const { return has_intercept() ? mode.back() : 0.0; }
};

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, GaussianApprox last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const GaussianApprox& last_iterate() const { return last_; }

 private:
  GaussianApprox last_;
};

/// Newton-Raphson with step halving on log p(y | x, theta) + log p(x | theta).
/// `start` optionally seeds the iteration (same layout as the mode).
/// Throws NewtonFailure when the iteration does not converge.
GaussianApprox newton_gaussian_approx(std::span<const double> y, const LatentSpec& latent,
                                      const ObsSpec& obs, const HyperPoint& hyper,
                                      const NewtonOptions& options = {},
                                      std::span<const double> start = {});

/// Laplace approximation of log p(y | theta) from a converged Gaussian approximation.
LogWeight laplace_log_marginal(const GaussianApprox& approx);

LogWeight laplace_log_marginal_given_hyper(std::span<const double> y, const LatentSpec& latent,
                                           const ObsSpec& obs, const HyperPoint& hyper,
                                           const NewtonOptions& options = {});

}  // namespace rfcp::gmrf
