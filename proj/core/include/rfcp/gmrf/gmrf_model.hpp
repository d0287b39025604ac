#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <vector>

#include "rfcp/gmrf/hyper_grid.hpp"
#include "rfcp/segment_model.hpp"

namespace rfcp::gmrf {

/// Segment marginal likelihoods for a latent-GMRF hierarchical model,
/// approximated by Laplace at each node of a fixed hyperparameter grid.
///
/// Segments shorter than min_segment_len (default 5) and segments on which
/// every grid node fails have marginal log-zero; failures are counted and the
/// first few are kept as diagnostics.
class GmrfSegmentModel final : public SegmentModel {
 public:
  GmrfSegmentModel(std::vector<double> y, LatentSpec latent, ObsSpec obs, HyperGrid grid,
                   std::size_t min_segment_len = 5, NewtonOptions newton = {});

  std::size_t size() const override { return y_.size(); }
  std::size_t min_segment_len() const override { return min_len_; }
  LogWeight log_marginal(std::size_t t, std::size_t s) const override;
  std::string name() const override;

  /// Full evaluation of one segment, including the best hyper node and its
  /// Gaussian approximation.
  HyperGridEvaluation evaluate(std::size_t t, std::size_t s) const;

  const LatentSpec& latent() const { return latent_; }
  const ObsSpec& obs() const { return obs_; }
  const HyperGrid& grid() const { return grid_; }
  const std::vector<double>& data() const { return y_; }

  std::size_t failed_node_count() const { return failed_nodes_.load(); }
  std::size_t failed_segment_count() const { return failed_segments_.load(); }
  std::vector<std::string> diagnostics() const;

 private:
  HyperGridEvaluation run(std::size_t t, std::size_t s, bool keep_best) const;

  std::vector<double> y_;
  LatentSpec latent_;
  ObsSpec obs_;
  HyperGrid grid_;
  std::size_t min_len_;
  NewtonOptions newton_;

  mutable std::atomic<std::size_t> failed_nodes_{0};
  mutable std::atomic<std::size_t> failed_segments_{0};
  mutable std::mutex diag_mutex_;
  mutable std::vector<std::string> diagnostics_;
};

struct SegmentFit {
  std::size_t start = 0;  // 1-based, inclusive
  std::size_t end = 0;
  HyperPoint hyper;
  double intercept = 0.0;
  LogWeight log_marginal = kLogZero;
};

struct LatentFieldSummary {
  std::vector<double> latent;            // x_i at the mode
  std::vector<double> linear_predictor;  // intercept + x_i
  std::vector<SegmentFit> segments;
};

/// Per segment between consecutive changepoints, takes the hyper node that
/// maximises Laplace marginal + prior and returns the Gaussian-approximation
/// mode there. `changepoints` are time indices in (0, n), strictly increasing.
LatentFieldSummary latent_field_mode_given_changepoints(const GmrfSegmentModel& model,
                                                        const std::vector<std::size_t>& changepoints);

}  // namespace rfcp::gmrf
