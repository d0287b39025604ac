#include "rfcp/gmrf/specs.hpp"

#include <cmath>
#include <stdexcept>

namespace rfcp::gmrf {
namespace {

void check_gamma(const GammaPrecisionPrior& p, const char* what) {
  if (!(p.shape > 0.0) || !(p.rate > 0.0) || !std::isfinite(p.shape) || !std::isfinite(p.rate)) {
    throw std::invalid_argument(std::string(what) + " Gamma prior needs positive shape and rate");
  }
}

void check_normal(const NormalPrior& p, const char* what) {
  if (!(p.sd > 0.0) || !std::isfinite(p.sd) || !std::isfinite(p.mean)) {
    throw std::invalid_argument(std::string(what) + " Normal prior needs a positive finite sd");
  }
}

}  // namespace

void LatentSpec::validate() const {
  check_gamma(precision, "latent precision");
  if (kind == LatentKind::AR1) check_normal(kappa, "kappa");
  if (kind == LatentKind::RW1 && !(rw1_initial_sd > 0.0)) {
    throw std::invalid_argument("RW1 initial sd must be positive");
  }
  if (intercept) check_normal(intercept_prior, "intercept");
}

void ObsSpec::validate() const {
  if (kind == ObsKind::GaussianIdentity) check_gamma(precision, "observation precision");
}

double phi_from_kappa(double kappa) { return std::tanh(0.5 * kappa); }

double kappa_from_phi(double phi) {
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("phi must satisfy |phi| < 1");
  return std::log((1.0 + phi) / (1.0 - phi));
}

std::string to_string(LatentKind kind) { return kind == LatentKind::AR1 ? "ar1" : "rw1"; }

std::string to_string(ObsKind kind) {
  switch (kind) {
    case ObsKind::GaussianIdentity:
      return "gaussian";
    case ObsKind::PoissonLog:
      return "poisson";
    case ObsKind::SVZeroMean:
      return "sv";
  }
  return "unknown";
}

LatentKind latent_kind_from_string(const std::string& s) {
  if (s == "ar1") return LatentKind::AR1;
  if (s == "rw1") return LatentKind::RW1;
  throw std::invalid_argument("unknown latent kind '" + s + "' (expected ar1 or rw1)");
}

ObsKind obs_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ObsKind::GaussianIdentity;
  if (s == "poisson") return ObsKind::PoissonLog;
  if (s == "sv") return ObsKind::SVZeroMean;
  throw std::invalid_argument("unknown observation kind '" + s +
                              "' (expected gaussian, poisson or sv)");
}

}  // namespace rfcp::gmrf
