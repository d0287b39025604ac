#include "rfcp/gmrf/laplace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace rfcp::gmrf {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Observation log-likelihood without data-only constants (lgamma(y+1) for
// counts), which do not affect the mode and are added back once.
inline ObsTerms obs_kernel(ObsKind kind, double y, double eta, double obs_precision) {
  switch (kind) {
    case ObsKind::GaussianIdentity: {
      const double r = y - eta;
      return {0.5 * std::log(obs_precision) - 0.5 * kLog2Pi - 0.5 * obs_precision * r * r,
              obs_precision * r, obs_precision};
    }
    case ObsKind::PoissonLog: {
      const double e = std::exp(eta);
      return {y * eta - e, y - e, e};
    }
    case ObsKind::SVZeroMean: {
      const double q = y * y * std::exp(-eta);
      return {-0.5 * (kLog2Pi + eta) - 0.5 * q, -0.5 + 0.5 * q, 0.5 * q};
    }
  }
  return {0.0, 0.0, 0.0};
}

double log_factorial(double y) {
  static const auto table = [] {
    std::array<double, 256> t{};
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::lgamma(static_cast<double>(k) + 1.0);
    return t;
  }();
  if (y >= 0.0 && y < 256.0 && y == std::floor(y)) return table[static_cast<std::size_t>(y)];
  return std::lgamma(y + 1.0);
}

double data_constant(ObsKind kind, std::span<const double> y) {
  if (kind != ObsKind::PoissonLog) return 0.0;
  double c = 0.0;
  for (double v : y) c -= log_factorial(v);
  return c;
}

double quad_form(const TridiagonalPrecision& q, std::span<const double> x) {
  double acc = 0.0;
  const std::size_t m = q.diag.size();
  for (std::size_t i = 0; i < m; ++i) {
    acc += q.diag[i] * x[i] * x[i];
    if (i + 1 < m) acc += 2.0 * q.off[i] * x[i] * x[i + 1];
  }
  return acc;
}

struct Problem {
  std::span<const double> y;
  ObsKind kind;
  double obs_precision;
  TridiagonalPrecision q;
  bool intercept;
  double intercept_mean;
  double intercept_precision;

  std::size_t m() const { return y.size(); }
  std::size_t dim() const { return m() + (intercept ? 1 : 0); }
  // Returns the objective (log posterior kernel); fills gradient and the
  // observation curvature when requested.
  double evaluate(std::span<const double> z, double* log_lik, double* prior_kernel,
                  std::vector<double>* grad, std::vector<double>* w) const {
    const std::size_t n = m();
    const double a = intercept ? z[n] : 0.0;
    double ll = 0.0;
    double xqx = 0.0;
    double grad_a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ObsTerms t = obs_kernel(kind, y[i], z[i] + a, obs_precision);
      double qx = q.diag[i] * z[i];
      if (i > 0) qx += q.off[i - 1] * z[i - 1];
      if (i + 1 < n) qx += q.off[i] * z[i + 1];
      ll += t.loglik;
      xqx += z[i] * qx;
      grad_a += t.grad;
      if (grad) (*grad)[i] = t.grad - qx;
      if (w) (*w)[i] = t.neg_hess;
    }
    double pk = -0.5 * xqx;
    if (intercept) {
      const double d = z[n] - intercept_mean;
      pk -= 0.5 * intercept_precision * d * d;
      if (grad) (*grad)[n] = grad_a - intercept_precision * d;
    }
    if (log_lik) *log_lik = ll;
    if (prior_kernel) *prior_kernel = pk;
    return ll + pk;
  }

  void hessian(std::span<const double> w, ArrowMatrix& h) const {
    const std::size_t n = m();
    h.diag.resize(n);
    h.off.assign(q.off.begin(), q.off.end());
    for (std::size_t i = 0; i < n; ++i) h.diag[i] = q.diag[i] + w[i];
    if (intercept) {
      h.border.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
      double c = intercept_precision;
      for (std::size_t i = 0; i < n; ++i) c += w[i];
      h.corner = c;
    } else {
      h.border.clear();
    }
  }
};

double sup_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

std::vector<double> default_start(const Problem& p) {
  std::vector<double> z(p.dim(), 0.0);
  if (!p.intercept) return z;
  const double m = static_cast<double>(p.m());
  double a = p.intercept_mean;
  switch (p.kind) {
    case ObsKind::GaussianIdentity: {
      double s = 0.0;
      for (double v : p.y) s += v;
      a = s / m;
      break;
    }
    case ObsKind::PoissonLog: {
      double s = 0.0;
      for (double v : p.y) s += v;
      a = std::log((s + 0.5) / m);
      break;
    }
    case ObsKind::SVZeroMean: {
      double s = 0.0;
      for (double v : p.y) s += v * v;
      a = std::log(s / m + 1e-8);
      break;
    }
  }
  z.back() = a;
  return z;
}

}  // namespace

ObsTerms obs_terms(ObsKind kind, double y, double eta, double obs_precision) {
  ObsTerms t = obs_kernel(kind, y, eta, obs_precision);
  if (kind == ObsKind::PoissonLog) t.loglik -= std::lgamma(y + 1.0);
  return t;
}

TridiagonalPrecision ar1_precision(std::size_t m, double phi, double tau) {
  if (!(std::abs(phi) < 1.0)) {
    throw std::invalid_argument("AR(1) persistence must satisfy |phi| < 1, got " +
                                std::to_string(phi));
  }
  if (!(tau > 0.0)) throw std::invalid_argument("AR(1) innovation precision must be positive");
  TridiagonalPrecision q;
  q.diag.assign(m, tau * (1.0 + phi * phi));
  q.off.assign(m > 0 ? m - 1 : 0, -tau * phi);
  if (m == 1) {
    q.diag[0] = tau * (1.0 - phi * phi);
  } else if (m > 1) {
    q.diag.front() = tau;
    q.diag.back() = tau;
  }
  q.log_det = static_cast<double>(m) * std::log(tau) + std::log1p(-phi * phi);
  return q;
}

TridiagonalPrecision latent_precision(const LatentSpec& latent, std::size_t m,
                                      const HyperPoint& hyper) {
  if (latent.kind == LatentKind::AR1) {
    const double tau = latent.ar1_marginal_precision
                           ? hyper.latent_precision / (1.0 - hyper.phi * hyper.phi)
                           : hyper.latent_precision;
    return ar1_precision(m, hyper.phi, tau);
  }

  const double tau = hyper.latent_precision;
  const double p0 = 1.0 / (latent.rw1_initial_sd * latent.rw1_initial_sd);
  TridiagonalPrecision q;
  q.diag.assign(m, 2.0 * tau);
  q.off.assign(m > 0 ? m - 1 : 0, -tau);
  if (m == 1) {
    q.diag[0] = p0;
  } else if (m > 1) {
    q.diag.front() = tau + p0;
    q.diag.back() = tau;
  }
  q.log_det = static_cast<double>(m - 1) * std::log(tau) + std::log(p0);
  return q;
}

LogWeight ar1_log_prior(std::span<const double> x, double phi, double innovation_variance) {
  if (!(innovation_variance > 0.0)) {
    throw std::invalid_argument("AR(1) innovation variance must be positive");
  }
  const auto q = ar1_precision(x.size(), phi, 1.0 / innovation_variance);
  return -0.5 * static_cast<double>(x.size()) * kLog2Pi + 0.5 * q.log_det - 0.5 * quad_form(q, x);
}

GaussianApprox newton_gaussian_approx(std::span<const double> y, const LatentSpec& latent,
                                      const ObsSpec& obs, const HyperPoint& hyper,
                                      const NewtonOptions& options,
                                      std::span<const double> start) {
  if (y.empty()) throw std::invalid_argument("Gaussian approximation needs at least one datum");
  Problem p{y,
            obs.kind,
            hyper.obs_precision,
            latent_precision(latent, y.size(), hyper),
            latent.intercept,
            latent.intercept_prior.mean,
            1.0 / (latent.intercept_prior.sd * latent.intercept_prior.sd)};

  const std::size_t dim = p.dim();
  std::vector<double> z;
  if (start.size() == dim) {
    z.assign(start.begin(), start.end());
  } else {
    z = default_start(p);
  }

  std::vector<double> grad(dim), w(y.size()), step(dim), trial(dim);
  std::vector<double> grad_trial(dim), w_trial(y.size());
  double f = p.evaluate(z, nullptr, nullptr, &grad, &w);

  GaussianApprox out;
  ArrowMatrix h;
  ArrowCholesky chol;
  int iter = 0;
  bool converged = sup_norm(grad) < options.tolerance;
  while (!converged && iter < options.max_iterations) {
    ++iter;
    p.hessian(w, h);
    if (!chol.refactor(h)) {
      out.mode = z;
      out.iterations = iter;
      throw NewtonFailure("negative Hessian not positive definite", std::move(out));
    }
    chol.solve(grad, step);

    double scale = 1.0;
    double f_trial = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = z[i] + scale * step[i];
      f_trial = p.evaluate(trial, nullptr, nullptr, &grad_trial, &w_trial);
      if (std::isfinite(f_trial) && f_trial >= f - 1e-12 * std::max(1.0, std::abs(f))) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    const double step_norm = scale * sup_norm(step);
    if (!accepted) {
      if (sup_norm(step) < options.tolerance) {
        converged = true;
        break;
      }
      out.mode = z;
      out.iterations = iter;
      throw NewtonFailure("line search failed to find an ascent step", std::move(out));
    }
    z.swap(trial);
    grad.swap(grad_trial);
    w.swap(w_trial);
    f = f_trial;
    if (step_norm < options.tolerance || sup_norm(grad) < options.tolerance) converged = true;
  }
  if (!converged) {
    out.mode = z;
    out.iterations = iter;
    throw NewtonFailure("Newton iteration did not converge in " + std::to_string(iter) +
                            " iterations",
                        std::move(out));
  }

  double log_lik = 0.0;
  double prior_kernel = 0.0;
  p.evaluate(z, &log_lik, &prior_kernel, &grad, &w);
  p.hessian(w, out.precision);
  if (!chol.refactor(out.precision)) {
    out.mode = z;
    throw NewtonFailure("negative Hessian at the mode is not positive definite", std::move(out));
  }
  out.mode = std::move(z);
  out.log_det_precision = chol.log_det();
  out.log_lik = log_lik + data_constant(obs.kind, y);
  out.log_prior_kernel = prior_kernel;
  out.log_det_prior = p.q.log_det + (p.intercept ? std::log(p.intercept_precision) : 0.0);
  out.gradient_norm = sup_norm(grad);
  out.iterations = iter;
  out.converged = true;
  return out;
}

LogWeight laplace_log_marginal(const GaussianApprox& a) {
  return a.log_lik + a.log_prior_kernel + 0.5 * a.log_det_prior - 0.5 * a.log_det_precision;
}

LogWeight laplace_log_marginal_given_hyper(std::span<const double> y, const LatentSpec& latent,
                                           const ObsSpec& obs, const HyperPoint& hyper,
                                           const NewtonOptions& options) {
  return laplace_log_marginal(newton_gaussian_approx(y, latent, obs, hyper, options));
}

}  // namespace rfcp::gmrf
