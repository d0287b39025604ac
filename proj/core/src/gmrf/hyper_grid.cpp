#include "rfcp/gmrf/hyper_grid.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfcp::gmrf {
namespace {

void check_options(const HyperGridOptions& o) {
  if (o.nodes < 1) throw std::invalid_argument("hyper grid needs at least one node per dimension");
  if (!(o.lower_quantile > 0.0) || !(o.upper_quantile < 1.0) ||
      !(o.lower_quantile < o.upper_quantile)) {
    throw std::invalid_argument("hyper grid quantiles must satisfy 0 < lower < upper < 1");
  }
}

std::vector<double> trapezoid_log_weights(const std::vector<double>& nodes) {
  const std::size_t k = nodes.size();
  std::vector<double> w(k);
  const double h = (nodes.back() - nodes.front()) / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) w[i] = std::log((i == 0 || i + 1 == k) ? 0.5 * h : h);
  return w;
}

double normal_log_density(double x, const NormalPrior& p) {
  const double z = (x - p.mean) / p.sd;
  return -0.5 * z * z - std::log(p.sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

template <class Quantile, class LogDensity>
HyperDimension quantile_dimension(HyperRole role, const HyperGridOptions& o, Quantile quantile,
                                  LogDensity log_density) {
  check_options(o);
  HyperDimension d{role, {}, {}, {}};
  if (o.nodes == 1) {
    const double u = quantile(0.5);
    d.nodes = {u};
    d.log_prior = {log_density(u)};
    d.log_weight = {-d.log_prior[0]};
    return d;
  }
  const double lo = quantile(o.lower_quantile);
  const double hi = quantile(o.upper_quantile);
  d.nodes.resize(o.nodes);
  for (std::size_t i = 0; i < o.nodes; ++i) {
    d.nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(o.nodes - 1);
  }
  for (double u : d.nodes) d.log_prior.push_back(log_density(u));
  d.log_weight = trapezoid_log_weights(d.nodes);
  return d;
}

}  // namespace

std::string to_string(HyperRole role) {
  switch (role) {
    case HyperRole::LogLatentPrecision:
      return "log_latent_precision";
    case HyperRole::Kappa:
      return "kappa";
    case HyperRole::LogObsPrecision:
      return "log_obs_precision";
  }
  return "unknown";
}

double log_gamma_precision_density(double log_tau, const GammaPrecisionPrior& p) {
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) + p.shape * log_tau -
         p.rate * std::exp(log_tau);
}

HyperDimension log_precision_dimension(HyperRole role, const GammaPrecisionPrior& prior,
                                       const HyperGridOptions& options) {
  if (!(prior.shape > 0.0) || !(prior.rate > 0.0)) {
    throw std::invalid_argument("Gamma precision prior needs positive shape and rate");
  }
  const boost::math::gamma_distribution<double> dist(prior.shape, 1.0 / prior.rate);
  return quantile_dimension(
      role, options, [&](double p) { return std::log(boost::math::quantile(dist, p)); },
      [&](double u) { return log_gamma_precision_density(u, prior); });
}

HyperDimension kappa_dimension(const NormalPrior& prior, const HyperGridOptions& options) {
  if (!(prior.sd > 0.0)) throw std::invalid_argument("kappa prior sd must be positive");
  const boost::math::normal_distribution<double> dist(prior.mean, prior.sd);
  return quantile_dimension(
      HyperRole::Kappa, options, [&](double p) { return boost::math::quantile(dist, p); },
      [&](double u) { return normal_log_density(u, prior); });
}

HyperDimension fixed_dimension(HyperRole role, double value) {
  return HyperDimension{role, {value}, {0.0}, {0.0}};
}

HyperGrid::HyperGrid(std::vector<HyperDimension> dims) : dims_(std::move(dims)) {
  for (const auto& d : dims_) {
    if (d.nodes.empty() || d.nodes.size() != d.log_prior.size() ||
        d.nodes.size() != d.log_weight.size()) {
      throw std::invalid_argument("hyper grid dimension " + to_string(d.role) +
                                  " is empty or inconsistent");
    }
  }
  // Tensor product, last dimension varying fastest.
  std::size_t total = 1;
  for (const auto& d : dims_) total *= d.nodes.size();
  nodes_.reserve(total);
  std::vector<std::size_t> idx(dims_.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    HyperNode node;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const auto& d = dims_[k];
      const double u = d.nodes[idx[k]];
      node.log_prior += d.log_prior[idx[k]];
      node.log_weight += d.log_weight[idx[k]];
      switch (d.role) {
        case HyperRole::LogLatentPrecision:
          node.point.latent_precision = std::exp(u);
          break;
        case HyperRole::Kappa:
          node.point.phi = phi_from_kappa(u);
          break;
        case HyperRole::LogObsPrecision:
          node.point.obs_precision = std::exp(u);
          break;
      }
    }
    nodes_.push_back(node);
    for (std::size_t k = dims_.size(); k-- > 0;) {
      if (++idx[k] < dims_[k].nodes.size()) break;
      idx[k] = 0;
    }
  }
}

HyperGrid HyperGrid::build(const LatentSpec& latent, const ObsSpec& obs,
                           const HyperGridOptions& options) {
  latent.validate();
  obs.validate();
  std::vector<HyperDimension> dims;
  dims.push_back(log_precision_dimension(HyperRole::LogLatentPrecision, latent.precision, options));
  if (latent.kind == LatentKind::AR1) dims.push_back(kappa_dimension(latent.kappa, options));
  if (obs.kind == ObsKind::GaussianIdentity) {
    dims.push_back(log_precision_dimension(HyperRole::LogObsPrecision, obs.precision, options));
  }
  return HyperGrid(std::move(dims));
}

HyperGridEvaluation hyper_grid_log_marginal(std::span<const double> y, const LatentSpec& latent,
                                            const ObsSpec& obs, const HyperGrid& grid,
                                            const NewtonOptions& options, bool keep_best) {
  if (grid.size() == 0) throw std::invalid_argument("hyper grid is empty");
  HyperGridEvaluation out;
  LogSumAccumulator acc;
  double best = kLogZero;
  std::vector<double> warm;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const HyperNode& node = grid.nodes()[i];
    try {
      GaussianApprox approx = newton_gaussian_approx(y, latent, obs, node.point, options, warm);
      const double lm = laplace_log_marginal(approx);
      if (!std::isfinite(lm)) {
        ++out.failed_nodes;
        continue;
      }
      acc.add(lm + node.log_prior + node.log_weight);
      const double score = lm + node.log_prior;
      if (score > best) {
        best = score;
        out.best_node = i;
        if (keep_best) out.best_approx = approx;
      }
      warm = std::move(approx.mode);
    } catch (const NewtonFailure&) {
      ++out.failed_nodes;
      warm.clear();
    }
  }
  out.log_marginal = acc.value();
  return out;
}

}  // namespace rfcp::gmrf
