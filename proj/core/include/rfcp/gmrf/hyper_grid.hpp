#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rfcp/gmrf/laplace.hpp"
#include "rfcp/gmrf/specs.hpp"

namespace rfcp::gmrf {

enum class HyperRole { LogLatentPrecision, Kappa, LogObsPrecision };

std::string to_string(HyperRole role);

/// One hyperparameter axis in transformed space (log precision or kappa).
struct HyperDimension {
  HyperRole role;
  std::vector<double> nodes;
  std::vector<double> log_prior;   // prior log density in transformed space
  std::vector<double> log_weight;  // quadrature log weight
};

struct HyperGridOptions {
  std::size_t nodes = 9;
  double lower_quantile = 0.01;
  double upper_quantile = 0.99;
};

/// Prior on log(tau) for tau ~ Gamma(shape, rate).
double log_gamma_precision_density(double log_tau, const GammaPrecisionPrior& prior);

/// Nodes equally spaced in transformed space between the lower and upper
/// prior quantiles, trapezoid weights. A single node sits at the median and
/// carries the whole prior mass.
HyperDimension log_precision_dimension(HyperRole role, const GammaPrecisionPrior& prior,
                                       const HyperGridOptions& options);
HyperDimension kappa_dimension(const NormalPrior& prior, const HyperGridOptions& options);
/// Degenerate axis fixing a transformed hyperparameter at `value`.
HyperDimension fixed_dimension(HyperRole role, double value);

struct HyperNode {
  HyperPoint point;
  double log_prior = 0.0;
  double log_weight = 0.0;
};

/// Tensor-product grid of hyperparameter nodes, deterministic in order.
class HyperGrid {
 public:
  explicit HyperGrid(std::vector<HyperDimension> dims);

  /// Default grid: latent precision, plus kappa for AR1, plus observation
  /// precision for Gaussian observations.
  static HyperGrid build(const LatentSpec& latent, const ObsSpec& obs,
                         const HyperGridOptions& options = {});

  const std::vector<HyperDimension>& dimensions() const { return dims_; }
  const std::vector<HyperNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<HyperDimension> dims_;
  std::vector<HyperNode> nodes_;
};

struct HyperGridEvaluation {
  LogWeight log_marginal = kLogZero;
  std::size_t failed_nodes = 0;
  /// Node maximising Laplace marginal + log prior; valid when any node succeeded.
  std::size_t best_node = 0;
  GaussianApprox best_approx;
};

/// log P(segment) = log sum over nodes of [Laplace log p(y | theta) + log prior + log weight].
/// Successive nodes warm-start Newton from the previous mode. When
/// `keep_best` is set the Gaussian approximation at the best node is returned.
HyperGridEvaluation hyper_grid_log_marginal(std::span<const double> y, const LatentSpec& latent,
                                            const ObsSpec& obs, const HyperGrid& grid,
                                            const NewtonOptions& options = {},
                                            bool keep_best = false);

}  // namespace rfcp::gmrf
