#include "poinar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "poinar/innovations.hpp"

namespace poinar {

namespace {

double log_poisson(int k, double mean) {
  if (mean <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  return k * std::log(mean) - mean - log_factorial(k);
}

double log_binomial(int k, int n, double p) {
  if (k < 0 || k > n) return -INFINITY;
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k) + k * std::log(p) + (n - k) * std::log1p(-p);
}

// Convolution sum_r Binomial(y - r; y_T, alpha) * Poisson(r; mu) for y in 0..y_max.
std::vector<double> convolve(int y_T, double alpha, double mu, int y_max) {
  std::vector<double> binom(static_cast<std::size_t>(y_T) + 1);
  for (int k = 0; k <= y_T; ++k) binom[static_cast<std::size_t>(k)] = std::exp(log_binomial(k, y_T, alpha));
  std::vector<double> pois(static_cast<std::size_t>(y_max) + 1);
  for (int r = 0; r <= y_max; ++r) pois[static_cast<std::size_t>(r)] = std::exp(log_poisson(r, mu));
  std::vector<double> pmf(static_cast<std::size_t>(y_max) + 1, 0.0);
  for (int y = 0; y <= y_max; ++y) {
    double acc = 0.0;
    for (int k = std::max(0, y - y_max); k <= std::min(y, y_T); ++k)
      acc += binom[static_cast<std::size_t>(k)] * pois[static_cast<std::size_t>(y - k)];
    pmf[static_cast<std::size_t>(y)] = acc;
  }
  return pmf;
}

int default_y_max(int y_T, double mean) {
  return static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean))) + y_T;
}

}  // namespace

double ForecastDistribution::mass() const { return std::accumulate(pmf.begin(), pmf.end(), 0.0); }

namespace {

double conditional_mean_one_step_real(double y, double alpha, double lambda, double theta_next) {
  return alpha * y + lambda * theta_next;
}

}  // namespace

double conditional_mean_one_step(int y_T, double alpha, double lambda, double theta_next) {
  return conditional_mean_one_step_real(y_T, alpha, lambda, theta_next);
}

double conditional_mean_h_step(int y_T, double alpha, double lambda, const std::vector<double>& theta,
                               const std::vector<int>& future_seasons, int h) {
  if (h < 1) throw std::domain_error("forecast horizon must be at least 1");
  if (future_seasons.size() < static_cast<std::size_t>(h)) throw std::domain_error("season map shorter than horizon");
  double mean = y_T;
  for (int j = 1; j <= h; ++j)
    mean = conditional_mean_one_step_real(mean, alpha, lambda,
                                          theta[static_cast<std::size_t>(future_seasons[static_cast<std::size_t>(j - 1)] - 1)]);
  return mean;
}

ForecastDistribution predictive_pmf(int y_T, double alpha, double lambda, double theta_next,
                                    std::optional<int> y_max) {
  if (y_T < 0) throw std::domain_error("last count must be nonnegative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("thinning probability outside [0,1]");
  if (!(lambda >= 0.0) || !(theta_next >= 0.0)) throw std::domain_error("rate must be nonnegative");
  ForecastDistribution dist;
  dist.mean = conditional_mean_one_step(y_T, alpha, lambda, theta_next);
  int cap = y_max.value_or(default_y_max(y_T, dist.mean));
  cap = std::max(cap, y_T);
  const double mu = lambda * theta_next;
  for (;;) {
    dist.pmf = convolve(y_T, alpha, mu, cap);
    if (dist.mass() >= 1.0 - kTailBudget) break;
    cap = cap * 2 + 1;
  }
  return dist;
}

ForecastDistribution posterior_predictive(int y_T, const PosteriorDraws& draws, std::size_t l, int season,
                                          std::optional<int> y_max) {
  if (draws.draws.empty()) throw std::invalid_argument("posterior predictive needs at least one draw");
  if (season < 1 || season > kMonths) throw std::domain_error("season outside 1..12");
  const auto m = static_cast<std::size_t>(season - 1);

  // A common support: large enough for the most dispersed draw.
  int cap = y_max.value_or(0);
  for (const Draw& d : draws.draws) {
    const double mean = conditional_mean_one_step(y_T, d.alpha[l], draws.lambda(d, l), d.theta[m]);
    cap = std::max(cap, default_y_max(y_T, mean));
  }

  ForecastDistribution out;
  out.source = ForecastDistribution::Source::posterior_averaged;
  for (;;) {
    out.pmf.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    out.mean = 0.0;
    for (const Draw& d : draws.draws) {
      const double lambda = draws.lambda(d, l);
      const std::vector<double> p = convolve(y_T, d.alpha[l], lambda * d.theta[m], cap);
      for (std::size_t y = 0; y < p.size(); ++y) out.pmf[y] += p[y];
      out.mean += conditional_mean_one_step(y_T, d.alpha[l], lambda, d.theta[m]);
    }
    const double n = static_cast<double>(draws.draws.size());
    for (double& v : out.pmf) v /= n;
    out.mean /= n;
    if (out.mass() >= 1.0 - kTailBudget) break;
    cap = cap * 2 + 1;
  }
  return out;
}

int quantile(const ForecastDistribution& dist, double upsilon) {
  if (!(upsilon > 0.0 && upsilon < 1.0)) throw std::domain_error("quantile level must lie in (0,1)");
  double cdf = 0.0;
  for (std::size_t y = 0; y < dist.pmf.size(); ++y) {
    cdf += dist.pmf[y];
    if (cdf >= upsilon) return static_cast<int>(y);
  }
  return dist.y_max();
}

double posterior_mean_forecast(int y_T, const PosteriorDraws& draws, std::size_t l, int season) {
  if (draws.draws.empty()) throw std::invalid_argument("posterior forecast needs at least one draw");
  const auto m = static_cast<std::size_t>(season - 1);
  double acc = 0.0;
  for (const Draw& d : draws.draws)
    acc += conditional_mean_one_step(y_T, d.alpha[l], draws.lambda(d, l), d.theta[m]);
  return acc / static_cast<double>(draws.draws.size());
}

}  // namespace poinar
