#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rfcp::simulate {

/// Identifies the generator stack below. Bump when any transform changes so
/// that stored series can be traced to the code that produced them.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+boxmuller+poisson-inversion/v1";

/// Portable random source: the engine output is specified by the standard and
/// the transforms are implemented here, so draws match across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> gen_piecewise_gaussian(std::span<const double> means,
                                           std::span<const double> sds,
                                           std::span<const std::size_t> lengths,
                                           std::uint64_t seed);

struct SVSegmentParams {
  double phi = 0.9;
  double two_log_beta = 0.0;
  double sigma_x = 0.01;
  std::size_t length = 1;
};

/// Nine segments, 1000 points, changes after 200, 400, 600, 700, 800, 850, 900
/// and 950.
std::vector<SVSegmentParams> default_sv_segments();

struct SVSeries {
  std::vector<double> y;
  std::vector<double> latent;        // x_i, zero-mean AR(1) within each segment
  std::vector<double> log_variance;  // 2 log beta + x_i
};

/// Per segment: stationary AR(1) latent, then y_i ~ N(0, beta^2 exp(x_i)).
SVSeries gen_sv(std::span<const SVSegmentParams> segments, std::uint64_t seed);

/// Stationary AR(1) x with Poisson(exp(alpha + x_i)) counts.
std::vector<double> gen_poisson_ar1(std::size_t n, double alpha, double phi, double sigma_x,
                                    std::uint64_t seed);

}  // namespace rfcp::simulate
