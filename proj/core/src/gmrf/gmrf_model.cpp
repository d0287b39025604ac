#include "rfcp/gmrf/gmrf_model.hpp"

#include <cmath>
#include <stdexcept>

namespace rfcp::gmrf {
namespace {
constexpr std::size_t kMaxDiagnostics = 50;
}

GmrfSegmentModel::GmrfSegmentModel(std::vector<double> y, LatentSpec latent, ObsSpec obs,
                                   HyperGrid grid, std::size_t min_segment_len,
                                   NewtonOptions newton)
    : y_(std::move(y)),
      latent_(latent),
      obs_(obs),
      grid_(std::move(grid)),
      min_len_(min_segment_len),
      newton_(newton) {
  latent_.validate();
  obs_.validate();
  if (min_len_ < 1) throw std::invalid_argument("minimum segment length must be at least 1");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double v = y_[i];
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite observation at position " + std::to_string(i + 1));
    }
    if (obs_.kind == ObsKind::PoissonLog && (v < 0.0 || v != std::floor(v))) {
      throw std::invalid_argument("count at position " + std::to_string(i + 1) +
                                  " is not a nonnegative integer");
    }
  }
}

std::string GmrfSegmentModel::name() const {
  return "gmrf_" + to_string(latent_.kind) + "_" + to_string(obs_.kind);
}

HyperGridEvaluation GmrfSegmentModel::run(std::size_t t, std::size_t s, bool keep_best) const {
  const std::span<const double> seg(y_.data() + (t - 1), s - t + 1);
  HyperGridEvaluation ev = hyper_grid_log_marginal(seg, latent_, obs_, grid_, newton_, keep_best);
  if (ev.failed_nodes > 0) {
    failed_nodes_ += ev.failed_nodes;
    if (ev.failed_nodes == grid_.size()) ++failed_segments_;
    std::lock_guard lock(diag_mutex_);
    if (diagnostics_.size() < kMaxDiagnostics) {
      diagnostics_.push_back("segment [" + std::to_string(t) + ", " + std::to_string(s) + "]: " +
                             std::to_string(ev.failed_nodes) + " of " +
                             std::to_string(grid_.size()) + " hyper nodes failed to converge");
    }
  }
  return ev;
}

HyperGridEvaluation GmrfSegmentModel::evaluate(std::size_t t, std::size_t s) const {
  if (!check_segment(t, s)) return {};
  return run(t, s, true);
}

LogWeight GmrfSegmentModel::log_marginal(std::size_t t, std::size_t s) const {
  if (!check_segment(t, s)) return kLogZero;
  return run(t, s, false).log_marginal;
}

std::vector<std::string> GmrfSegmentModel::diagnostics() const {
  std::lock_guard lock(diag_mutex_);
  return diagnostics_;
}

LatentFieldSummary latent_field_mode_given_changepoints(
    const GmrfSegmentModel& model, const std::vector<std::size_t>& changepoints) {
  const std::size_t n = model.size();
  std::vector<std::size_t> bounds{0};
  for (std::size_t c : changepoints) {
    if (c <= bounds.back() || c >= n) {
      throw std::invalid_argument("changepoints must be strictly increasing within (0, n)");
    }
    bounds.push_back(c);
  }
  bounds.push_back(n);

  LatentFieldSummary out;
  out.latent.reserve(n);
  out.linear_predictor.reserve(n);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const std::size_t t = bounds[j] + 1;
    const std::size_t s = bounds[j + 1];
    const HyperGridEvaluation ev = model.evaluate(t, s);
    if (!std::isfinite(ev.log_marginal) || ev.best_approx.mode.empty()) {
      throw std::runtime_error("no usable Gaussian approximation for segment [" +
                               std::to_string(t) + ", " + std::to_string(s) + "]");
    }
    const GaussianApprox& a = ev.best_approx;
    const double intercept = a.intercept();
    for (std::size_t i = 0; i < a.latent_size(); ++i) {
      out.latent.push_back(a.mode[i]);
      out.linear_predictor.push_back(a.mode[i] + intercept);
    }
    out.segments.push_back(
        SegmentFit{t, s, model.grid().nodes()[ev.best_node].point, intercept, ev.log_marginal});
  }
  return out;
}

}  // namespace rfcp::gmrf
