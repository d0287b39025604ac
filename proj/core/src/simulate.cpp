#include "rfcp/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfcp::simulate {
namespace {

void check_ar1(double phi, double sigma_x) {
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("AR(1) persistence must satisfy |phi| < 1");
  if (!(sigma_x >= 0.0) || !std::isfinite(sigma_x)) {
    throw std::invalid_argument("AR(1) innovation sd must be nonnegative");
  }
}

void ar1_path(Rng& rng, double phi, double sigma_x, std::size_t length, std::vector<double>& out) {
  double x = sigma_x / std::sqrt(1.0 - phi * phi) * rng.normal();
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) x = phi * x + sigma_x * rng.normal();
    out.push_back(x);
  }
}

}  // namespace

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  // Sequential inversion is exact but needs exp(-mean) to stay representable;
  // larger means are split into independent pieces.
  constexpr double kPiece = 30.0;
  const auto pieces = static_cast<std::uint64_t>(std::ceil(mean / kPiece));
  const double lambda = mean / static_cast<double>(pieces);
  std::uint64_t total = 0;
  for (std::uint64_t p = 0; p < pieces; ++p) {
    const double u = uniform();
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    std::uint64_t k = 0;
    while (u >= cdf && pmf > 0.0) {
      ++k;
      pmf *= lambda / static_cast<double>(k);
      cdf += pmf;
    }
    total += k;
  }
  return total;
}

std::vector<double> gen_piecewise_gaussian(std::span<const double> means,
                                           std::span<const double> sds,
                                           std::span<const std::size_t> lengths,
                                           std::uint64_t seed) {
  if (means.size() != sds.size() || means.size() != lengths.size()) {
    throw std::invalid_argument("segment means, sds and lengths must have equal length");
  }
  Rng rng(seed);
  std::vector<double> y;
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (!(sds[j] >= 0.0)) throw std::invalid_argument("segment sd must be nonnegative");
    for (std::size_t i = 0; i < lengths[j]; ++i) y.push_back(means[j] + sds[j] * rng.normal());
  }
  return y;
}

std::vector<SVSegmentParams> default_sv_segments() {
  const double phi[] = {0.9, 0.8, 0.9, 0.7, 0.8, 0.9, 0.8, 0.9, 0.8};
  const double tlb[] = {0.0, 2.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.25, 0.0};
  const double sx[] = {0.01, 0.05, 0.01, 0.05, 0.01, 0.05, 0.01, 0.05, 0.01};
  const std::size_t bounds[] = {0, 200, 400, 600, 700, 800, 850, 900, 950, 1000};
  std::vector<SVSegmentParams> out;
  for (std::size_t j = 0; j < 9; ++j) out.push_back({phi[j], tlb[j], sx[j], bounds[j + 1] - bounds[j]});
  return out;
}

SVSeries gen_sv(std::span<const SVSegmentParams> segments, std::uint64_t seed) {
  Rng rng(seed);
  SVSeries out;
  for (const auto& seg : segments) {
    check_ar1(seg.phi, seg.sigma_x);
    if (seg.length < 1) throw std::invalid_argument("SV segment length must be at least 1");
    const std::size_t begin = out.latent.size();
    ar1_path(rng, seg.phi, seg.sigma_x, seg.length, out.latent);
    for (std::size_t i = begin; i < out.latent.size(); ++i) {
      const double lv = seg.two_log_beta + out.latent[i];
      out.log_variance.push_back(lv);
      out.y.push_back(std::exp(0.5 * lv) * rng.normal());
    }
  }
  return out;
}

std::vector<double> gen_poisson_ar1(std::size_t n, double alpha, double phi, double sigma_x,
                                    std::uint64_t seed) {
  check_ar1(phi, sigma_x);
  Rng rng(seed);
  std::vector<double> x;
  x.reserve(n);
  ar1_path(rng, phi, sigma_x, n, x);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(rng.poisson(std::exp(alpha + x[i])));
  return y;
}

}  // namespace rfcp::simulate
