#pragma once

#include <string>

namespace rfcp::gmrf {

struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
};

/// Gamma(shape, rate) prior on a precision; mean shape / rate.
struct GammaPrecisionPrior {
  double shape = 1.0;
  double rate = 0.01;
};

enum class LatentKind { AR1, RW1 };

/// Within-segment latent Gaussian field x_1..x_m.
///
/// AR1 is stationary with persistence phi and innovation precision tau; phi is
/// reparameterised as kappa = logit((1 + phi) / 2). RW1 uses a proper start,
/// x_1 ~ N(0, rw1_initial_sd^2), so that segment marginals are comparable.
struct LatentSpec {
  LatentKind kind = LatentKind::AR1;
  GammaPrecisionPrior precision{};
  NormalPrior kappa{3.0, 1.0};
  double rw1_initial_sd = 10.0;
  /// When set, the AR1 precision hyperparameter is the marginal precision
  /// (1 - phi^2) / sigma_x^2 rather than the innovation precision 1 / sigma_x^2.
  bool ar1_marginal_precision = false;

  /// Optional scalar added to every linear predictor (the Poisson log-rate
  /// intercept, 2 log beta for volatility, or a level for Gaussian data).
  bool intercept = false;
  NormalPrior intercept_prior{0.0, 10.0};

  void validate() const;
};

enum class ObsKind { GaussianIdentity, PoissonLog, SVZeroMean };

struct ObsSpec {
  ObsKind kind = ObsKind::GaussianIdentity;
  /// Observation precision prior, GaussianIdentity only.
  GammaPrecisionPrior precision{1.0, 0.01};

  void validate() const;
};

double phi_from_kappa(double kappa);
double kappa_from_phi(double phi);

std::string to_string(LatentKind kind);
std::string to_string(ObsKind kind);
LatentKind latent_kind_from_string(const std::string& s);
ObsKind obs_kind_from_string(const std::string& s);

}  // namespace rfcp::gmrf
