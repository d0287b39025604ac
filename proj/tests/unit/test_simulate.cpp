#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rfcp/simulate.hpp"

using namespace rfcp::simulate;

namespace {

double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return std::accumulate(v.begin() + static_cast<long>(begin), v.begin() + static_cast<long>(end), 0.0) /
         static_cast<double>(end - begin);
}

}  // namespace

TEST_CASE("uniform draws stay in the unit interval and normals are standard") {
  Rng rng(1);
  double s = 0.0, ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("Poisson draws have matching mean and variance") {
  for (double lambda : {0.3, 4.0, 75.0}) {
    Rng rng(3);
    double s = 0.0, ss = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double k = rng.poisson(lambda);
      REQUIRE(k == std::floor(k));
      s += k;
      ss += k * k;
    }
    const double m = s / n;
    CAPTURE(lambda);
    CHECK(std::abs(m - lambda) < 5.0 * std::sqrt(lambda / n));
    CHECK((ss / n - m * m) == doctest::Approx(lambda).epsilon(0.03));
  }
}

TEST_CASE("piecewise Gaussian series") {
  const std::vector<double> means{0.0, 5.0};
  const std::vector<double> sds{1.0, 1.0};
  const std::vector<std::size_t> lengths{97, 103};
  const auto y = gen_piecewise_gaussian(means, sds, lengths, 4);
  REQUIRE(y.size() == 200);
  CHECK(std::abs(mean(y, 0, 97) - 0.0) < 4.0 / std::sqrt(97.0));
  CHECK(std::abs(mean(y, 97, 200) - 5.0) < 4.0 / std::sqrt(103.0));
  CHECK(gen_piecewise_gaussian(means, sds, lengths, 4) == y);
  CHECK(gen_piecewise_gaussian(means, sds, lengths, 5) != y);

  const auto flat = gen_piecewise_gaussian(std::vector<double>{1.0, -2.0}, std::vector<double>{0.0, 0.0},
                                           std::vector<std::size_t>{3, 2}, 1);
  CHECK(flat == std::vector<double>{1.0, 1.0, 1.0, -2.0, -2.0});

  CHECK_THROWS_AS(gen_piecewise_gaussian(means, std::vector<double>{1.0}, lengths, 1), std::invalid_argument);
}

TEST_CASE("default stochastic volatility segments") {
  const auto segs = default_sv_segments();
  REQUIRE(segs.size() == 9);
  std::vector<std::size_t> bounds;
  std::size_t pos = 0;
  for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
    pos += segs[j].length;
    bounds.push_back(pos);
  }
  CHECK(bounds == std::vector<std::size_t>{200, 400, 600, 700, 800, 850, 900, 950});
  CHECK(pos + segs.back().length == 1000);
  CHECK(segs[1].two_log_beta == 2.0);
  CHECK(segs[3].phi == 0.7);
  CHECK(segs[8].sigma_x == 0.01);

  const auto sv = gen_sv(segs, 1);
  CHECK(sv.y.size() == 1000);
  CHECK(sv.latent.size() == 1000);
  CHECK(sv.log_variance.size() == 1000);
  CHECK(gen_sv(segs, 1).y == sv.y);
}

TEST_CASE("stochastic volatility with a constant latent field") {
  const std::vector<SVSegmentParams> segs{{0.5, 1.0, 0.0, 500}};
  const auto sv = gen_sv(segs, 2);
  for (double x : sv.latent) CHECK(x == 0.0);
  double ss = 0.0;
  for (double y : sv.y) ss += y * y;
  CHECK(ss / 500.0 == doctest::Approx(std::exp(1.0)).epsilon(0.2));
}

TEST_CASE("stochastic volatility segment variances follow the lognormal moment") {
  const std::vector<SVSegmentParams> segs{{0.9, 0.0, 0.3, 4000}, {0.7, 1.5, 0.5, 4000}};
  const auto sv = gen_sv(segs, 9);
  std::size_t begin = 0;
  for (const auto& s : segs) {
    double ss = 0.0;
    for (std::size_t i = begin; i < begin + s.length; ++i) ss += sv.y[i] * sv.y[i];
    const double expected =
        std::exp(s.two_log_beta) * std::exp(0.5 * s.sigma_x * s.sigma_x / (1.0 - s.phi * s.phi));
    CHECK(ss / static_cast<double>(s.length) == doctest::Approx(expected).epsilon(0.25));
    begin += s.length;
  }
  CHECK_THROWS_AS(gen_sv(std::vector<SVSegmentParams>{{1.0, 0.0, 0.1, 10}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_sv(std::vector<SVSegmentParams>{{0.5, 0.0, 0.1, 0}}, 1), std::invalid_argument);
}

TEST_CASE("Poisson counts on an AR(1) log intensity") {
  const auto flat = gen_poisson_ar1(20000, std::log(3.0), 0.5, 0.0, 1);
  CHECK(mean(flat, 0, flat.size()) == doctest::Approx(3.0).epsilon(0.03));

  const double alpha = 0.5, phi = 0.8, sx = 0.3;
  const auto y = gen_poisson_ar1(10000, alpha, phi, sx, 2);
  REQUIRE(y.size() == 10000);
  const double expected = std::exp(alpha + sx * sx / (2.0 * (1.0 - phi * phi)));
  CHECK(mean(y, 0, y.size()) == doctest::Approx(expected).epsilon(0.1));
  CHECK(gen_poisson_ar1(100, alpha, phi, sx, 7) == gen_poisson_ar1(100, alpha, phi, sx, 7));
  CHECK_THROWS_AS(gen_poisson_ar1(10, 0.0, 1.5, 0.1, 1), std::invalid_argument);
}
