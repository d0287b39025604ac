#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rfcp/conjugate_models.hpp"

using namespace rfcp;

namespace {

double student_t_log_density(double x, double dof, double loc, double scale2) {
  const double z = (x - loc) * (x - loc) / scale2;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale2) - 0.5 * (dof + 1.0) * std::log1p(z / dof);
}

// Sequential one-step predictive updating of the normal-inverse-gamma posterior.
double nig_predictive_sum(const std::vector<double>& y, std::size_t t, std::size_t s,
                          NormalInverseGammaPrior p) {
  double m = p.mean, k = p.kappa, a = p.shape, b = p.rate, total = 0.0;
  for (std::size_t i = t; i <= s; ++i) {
    const double x = y[i - 1];
    total += student_t_log_density(x, 2.0 * a, m, b * (k + 1.0) / (a * k));
    b += k * (x - m) * (x - m) / (2.0 * (k + 1.0));
    m = (k * m + x) / (k + 1.0);
    k += 1.0;
    a += 0.5;
  }
  return total;
}

double poisson_gamma_predictive_sum(const std::vector<double>& y, std::size_t t, std::size_t s,
                                    GammaPrior p) {
  double a = p.shape, b = p.rate, total = 0.0;
  for (std::size_t i = t; i <= s; ++i) {
    const double c = y[i - 1];
    total += std::lgamma(a + c) - std::lgamma(a) - std::lgamma(c + 1.0) + a * std::log(b / (b + 1.0)) -
             c * std::log(b + 1.0);
    a += c;
    b += 1.0;
  }
  return total;
}

double dirichlet_predictive_sum(const std::vector<std::uint8_t>& y, std::size_t t, std::size_t s,
                                double alpha) {
  std::array<double, 4> counts{};
  double total = 0.0;
  double n = 0.0;
  for (std::size_t i = t; i <= s; ++i) {
    total += std::log((counts[y[i - 1]] + alpha) / (n + 4.0 * alpha));
    counts[y[i - 1]] += 1.0;
    n += 1.0;
  }
  return total;
}

std::vector<std::uint8_t> random_symbols(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 3);
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = static_cast<std::uint8_t>(d(rng));
  return v;
}

}  // namespace

TEST_CASE("multinomial-Dirichlet closed forms") {
  const std::vector<std::uint8_t> one{2};
  for (double alpha : {0.1, 1.0, 7.5}) {
    MultinomialDirichletModel m(one, alpha);
    CHECK(m.log_marginal(1, 1) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
  }
  const std::vector<std::uint8_t> aa{0, 0};
  CHECK(MultinomialDirichletModel(aa, 1.0).log_marginal(1, 2) ==
        doctest::Approx(std::log(0.1)).epsilon(1e-14));
  const std::vector<std::uint8_t> acgt{0, 1, 2, 3};
  const double direct = std::lgamma(4.0) - std::lgamma(8.0);
  CHECK(multinomial_dirichlet_log_marginal(1, 4, MultinomialDirichletModel(acgt, 1.0)) ==
        doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("multinomial-Dirichlet matches sequential predictive and recount") {
  const auto y = random_symbols(500, 3);
  MultinomialDirichletModel m(y, 0.7);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pos(1, y.size());
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t t = pos(rng), s = pos(rng);
    if (t > s) std::swap(t, s);
    std::array<std::uint32_t, 4> counts{};
    for (std::size_t i = t; i <= s; ++i) ++counts[y[i - 1]];
    REQUIRE(m.counts(t, s) == counts);
    if (trial < 200) CHECK(std::abs(m.log_marginal(t, s) - dirichlet_predictive_sum(y, t, s, 0.7)) < 1e-10);
  }
}

TEST_CASE("multinomial-Dirichlet is invariant to symbol relabelling") {
  const auto y = random_symbols(200, 5);
  std::vector<std::uint8_t> relabelled(y.size());
  const std::array<std::uint8_t, 4> perm{2, 0, 3, 1};
  for (std::size_t i = 0; i < y.size(); ++i) relabelled[i] = perm[y[i]];
  MultinomialDirichletModel a(y, 1.3), b(relabelled, 1.3);
  for (std::size_t t = 1; t <= 200; t += 13) {
    for (std::size_t s = t; s <= 200; s += 17) CHECK(a.log_marginal(t, s) == doctest::Approx(b.log_marginal(t, s)).epsilon(1e-12));
  }
}

TEST_CASE("normal-inverse-gamma single observation at the prior mean") {
  const NormalInverseGammaPrior p{2.0, 0.5, 3.0, 1.5};
  const std::vector<double> y{2.0};
  GaussianConjugateModel m(y, p);
  CHECK(m.log_marginal(1, 1) ==
        doctest::Approx(student_t_log_density(2.0, 6.0, 2.0, 1.5 * 1.5 / (3.0 * 0.5))).epsilon(1e-13));
}

TEST_CASE("normal-inverse-gamma matches sequential predictive") {
  const NormalInverseGammaPrior p{0.3, 2.0, 1.5, 0.8};
  const std::vector<double> equal{1.25, 1.25};
  CHECK(std::abs(GaussianConjugateModel(equal, p).log_marginal(1, 2) -
                 nig_predictive_sum(equal, 1, 2, p)) < 1e-12);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(5.0, 2.0);
  std::vector<double> y(300);
  for (auto& v : y) v = d(rng);
  GaussianConjugateModel m(y, p);
  std::uniform_int_distribution<std::size_t> pos(1, y.size());
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t t = pos(rng), s = pos(rng);
    if (t > s) std::swap(t, s);
    CHECK(std::abs(gaussian_conjugate_log_marginal(t, s, m) - nig_predictive_sum(y, t, s, p)) < 1e-10);
  }
}

TEST_CASE("normal-inverse-gamma prefix sums agree with a recount") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(1000.0, 0.5);
  std::vector<double> y(2000);
  for (auto& v : y) v = d(rng);
  const NormalInverseGammaPrior p{1000.0, 0.1, 2.0, 2.0};
  GaussianConjugateModel m(y, p);
  std::uniform_int_distribution<std::size_t> pos(1, y.size());
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t t = pos(rng), s = pos(rng);
    if (t > s) std::swap(t, s);
    const std::vector<double> sub(y.begin() + static_cast<long>(t - 1), y.begin() + static_cast<long>(s));
    GaussianConjugateModel local(sub, p);
    CHECK(std::abs(m.log_marginal(t, s) - local.log_marginal(1, sub.size())) < 1e-9);
  }
}

TEST_CASE("normal-inverse-gamma rejects degenerate priors") {
  const std::vector<double> y{1.0};
  CHECK_THROWS_AS(GaussianConjugateModel(y, {0.0, INFINITY, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianConjugateModel(y, {0.0, 0.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianConjugateModel(y, {0.0, 1.0, -1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Poisson-Gamma closed forms") {
  const std::vector<double> zero{0.0};
  CHECK(PoissonGammaModel(zero, {1.0, 1.0}).log_marginal(1, 1) == doctest::Approx(std::log(0.5)));
  const std::vector<double> zeros(7, 0.0);
  const GammaPrior p{2.5, 1.5};
  CHECK(PoissonGammaModel(zeros, p).log_marginal(1, 7) ==
        doctest::Approx(2.5 * std::log(1.5 / 8.5)).epsilon(1e-14));
}

TEST_CASE("Poisson-Gamma matches sequential predictive and recount") {
  std::mt19937_64 rng(8);
  std::poisson_distribution<int> d(3.0);
  std::vector<double> y(400);
  for (auto& v : y) v = d(rng);
  const GammaPrior p{1.0, 0.5};
  PoissonGammaModel m(y, p);
  std::uniform_int_distribution<std::size_t> pos(1, y.size());
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t t = pos(rng), s = pos(rng);
    if (t > s) std::swap(t, s);
    CHECK(std::abs(poisson_gamma_log_marginal(t, s, m) - poisson_gamma_predictive_sum(y, t, s, p)) < 1e-9);
  }
}

TEST_CASE("Poisson-Gamma rejects invalid counts and priors") {
  CHECK_THROWS_AS(PoissonGammaModel(std::vector<double>{1.0, -1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(PoissonGammaModel(std::vector<double>{1.5}, {}), std::invalid_argument);
  CHECK_THROWS_AS(PoissonGammaModel(std::vector<double>{1.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("segment indices are range checked") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  PoissonGammaModel m(y, {});
  CHECK_THROWS_AS(m.log_marginal(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(m.log_marginal(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(m.log_marginal(1, 4), std::invalid_argument);
}
