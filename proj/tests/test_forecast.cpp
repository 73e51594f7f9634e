#include <doctest.h>

#include <cmath>
#include <numeric>

#include "poinar/forecast.hpp"

using namespace poinar;

namespace {

// P(Y = y) = sum_r Binomial(y_T, alpha)(r) * Poisson(mu)(y - r).
double convolution_oracle(int y_T, double alpha, double mu, int y) {
  double p = 0.0;
  for (int r = 0; r <= std::min(y, y_T); ++r) {
    const double b = std::exp(std::lgamma(y_T + 1.0) - std::lgamma(r + 1.0) - std::lgamma(y_T - r + 1.0)) *
                     std::pow(alpha, r) * std::pow(1.0 - alpha, y_T - r);
    const int e = y - r;
    const double q = mu > 0.0 ? std::exp(-mu + e * std::log(mu) - std::lgamma(e + 1.0)) : (e == 0 ? 1.0 : 0.0);
    p += b * q;
  }
  return p;
}

PosteriorDraws draws_of(std::vector<std::pair<double, double>> alpha_lambda) {
  PosteriorDraws d;
  d.num_series = 1;
  int it = 0;
  for (auto [a, lam] : alpha_lambda) {
    Draw dr;
    dr.iteration = ++it;
    dr.alpha = {a};
    dr.z = {0};
    dr.phi_star = {lam};
    dr.theta.assign(kMonths, 1.0);
    dr.theta[2] = 1.5;
    d.draws.push_back(dr);
  }
  return d;
}

}  // namespace

TEST_CASE("one-step conditional mean") {
  CHECK(conditional_mean_one_step(2, 0.5, 1.0, 1.0) == 2.0);
  CHECK(conditional_mean_one_step(9, 0.0, 1.5, 0.8) == doctest::Approx(1.2));
  CHECK(conditional_mean_one_step(0, 0.7, 1.5, 0.8) == doctest::Approx(1.2));
}

TEST_CASE("multi-step conditional mean") {
  std::vector<double> theta(kMonths);
  for (int m = 0; m < kMonths; ++m) theta[static_cast<std::size_t>(m)] = 0.5 + 0.1 * m;
  const std::vector<int> seasons{3, 4, 4, 5, 5, 6};
  CHECK(conditional_mean_h_step(4, 0.3, 2.0, theta, seasons, 1) ==
        conditional_mean_one_step(4, 0.3, 2.0, theta[2]));
  CHECK(conditional_mean_h_step(4, 0.0, 2.0, theta, seasons, 3) == doctest::Approx(2.0 * theta[3]));
  const std::vector<double> ones(kMonths, 1.0);
  CHECK(conditional_mean_h_step(2, 1.0, 1.0, ones, seasons, 5) == doctest::Approx(7.0));
  for (int h = 2; h <= 6; ++h) {
    const double prev = conditional_mean_h_step(4, 0.3, 2.0, theta, seasons, h - 1);
    const double next = conditional_mean_h_step(4, 0.3, 2.0, theta, seasons, h);
    CHECK(next == doctest::Approx(0.3 * prev + 2.0 * theta[static_cast<std::size_t>(seasons[static_cast<std::size_t>(h - 1)] - 1)]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(conditional_mean_h_step(1, 0.5, 1.0, theta, seasons, 7), std::domain_error);
  CHECK_THROWS_AS(conditional_mean_h_step(1, 0.5, 1.0, theta, seasons, 0), std::domain_error);
}

TEST_CASE("predictive pmf special cases") {
  auto d = predictive_pmf(0, 0.6, 1.3, 1.0);
  CHECK(d.pmf[0] == doctest::Approx(std::exp(-1.3)));
  for (int y = 0; y <= d.y_max(); ++y)
    CHECK(d.pmf[static_cast<std::size_t>(y)] == doctest::Approx(std::exp(-1.3 + y * std::log(1.3) - std::lgamma(y + 1.0))));

  d = predictive_pmf(3, 0.5, 0.0, 1.0);
  const double binom[] = {0.125, 0.375, 0.375, 0.125};
  for (int y = 0; y <= 3; ++y) CHECK(d.pmf[static_cast<std::size_t>(y)] == doctest::Approx(binom[y]));

  d = predictive_pmf(1, 0.5, 1.0, 1.0);
  CHECK(d.pmf[0] == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(d.pmf[0] == doctest::Approx(0.18394).epsilon(1e-4));
}

TEST_CASE("predictive pmf matches convolution and its mean") {
  for (int y_T : {0, 1, 4, 17})
    for (double a : {0.0, 0.2, 0.75, 1.0})
      for (double mu : {0.05, 1.0, 6.5}) {
        const auto d = predictive_pmf(y_T, a, mu, 1.0);
        CHECK(d.mass() >= 1.0 - kTailBudget);
        CHECK(d.mean == doctest::Approx(a * y_T + mu).epsilon(1e-15));
        double m = 0.0;
        for (int y = 0; y <= d.y_max(); ++y) {
          CHECK(std::abs(d.pmf[static_cast<std::size_t>(y)] - convolution_oracle(y_T, a, mu, y)) < 1e-13);
          m += y * d.pmf[static_cast<std::size_t>(y)];
        }
        CHECK(std::abs(m - d.mean) < 1e-6);
      }
}

TEST_CASE("a too-small cap is extended") {
  const auto d = predictive_pmf(30, 0.5, 20.0, 1.0, 3);
  CHECK(d.y_max() > 3);
  CHECK(d.mass() >= 1.0 - kTailBudget);
}

TEST_CASE("posterior predictive averaging") {
  const auto one = draws_of({{0.4, 2.0}});
  const auto p = posterior_predictive(5, one, 0, 3);
  const auto q = predictive_pmf(5, 0.4, 2.0, 1.5);
  REQUIRE(p.pmf.size() >= q.pmf.size());
  for (std::size_t y = 0; y < q.pmf.size(); ++y) CHECK(p.pmf[y] == doctest::Approx(q.pmf[y]));

  const auto two = draws_of({{0.4, 2.0}, {0.4, 2.0}});
  const auto r = posterior_predictive(5, two, 0, 3);
  CHECK(r.pmf == p.pmf);

  const auto mix = draws_of({{0.1, 1.0}, {0.9, 8.0}});
  const auto m = posterior_predictive(5, mix, 0, 1);
  CHECK(m.mass() >= 1.0 - kTailBudget);
  CHECK(m.mass() <= 1.0 + 1e-12);
  CHECK(m.mean == doctest::Approx(0.5 * (0.5 + 1.0) + 0.5 * (4.5 + 8.0)));
  CHECK(posterior_mean_forecast(5, mix, 0, 1) == doctest::Approx(m.mean));

  PosteriorDraws empty;
  empty.num_series = 1;
  CHECK_THROWS(posterior_predictive(1, empty, 0, 1));
  CHECK_THROWS(posterior_mean_forecast(1, empty, 0, 1));
}

TEST_CASE("quantiles") {
  ForecastDistribution point;
  point.pmf = {0.0, 0.0, 0.0, 1.0};
  CHECK(quantile(point, 0.5) == 3);

  const auto pois = predictive_pmf(0, 0.5, 1.0, 1.0);
  CHECK(quantile(pois, 0.95) == 3);
  CHECK(quantile(pois, 0.9) == 2);

  const auto d = predictive_pmf(6, 0.3, 2.5, 1.0);
  int prev = 0;
  for (double u = 0.01; u < 1.0; u += 0.01) {
    const int q = quantile(d, u);
    CHECK(q >= prev);
    prev = q;
  }
  CHECK_THROWS_AS(quantile(d, 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(d, 1.0), std::domain_error);
}
