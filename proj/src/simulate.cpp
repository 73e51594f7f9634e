#include "poinar/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace poinar {

int binomial_thin(int x, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("thinning probability outside [0,1]");
  if (x < 0) throw std::domain_error("cannot thin a negative count");
  if (x == 0 || alpha == 0.0) return 0;
  if (alpha == 1.0) return x;
  return std::binomial_distribution<int>(x, alpha)(rng);
}

double stationary_mean(double lambda, double alpha) {
  if (!(alpha < 1.0)) throw std::domain_error("stationary mean requires alpha < 1");
  return lambda / (1.0 - alpha);
}

std::chrono::sys_days default_origin() {
  using namespace std::chrono;
  return sys_days{year{2001} / January / 1};
}

WeeklyCalendar weekly_calendar(std::chrono::sys_days first, std::size_t weeks) {
  using namespace std::chrono;
  WeeklyCalendar cal;
  cal.week_start.reserve(weeks);
  cal.season_of.reserve(weeks);
  for (std::size_t t = 0; t < weeks; ++t) {
    const sys_days day = first + days{7 * static_cast<long>(t)};
    cal.week_start.push_back(day);
    cal.season_of.push_back(static_cast<int>(static_cast<unsigned>(year_month_day{day}.month())));
  }
  return cal;
}

std::vector<int> simulate_poinar(double lambda, double alpha, const std::vector<double>& theta,
                                 const std::vector<int>& season_of, std::size_t T,
                                 std::optional<int> y0, Rng& rng) {
  return simulate_poinar(lambda, alpha, theta, season_of, T, y0, rng, nullptr);
}

std::vector<int> simulate_poinar(double lambda, double alpha, const std::vector<double>& theta,
                                 const std::vector<int>& season_of, std::size_t T,
                                 std::optional<int> y0, Rng& rng, std::vector<int>* innovations) {
  if (!(lambda >= 0.0)) throw std::domain_error("innovation rate must be nonnegative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("thinning probability outside [0,1]");
  if (theta.size() != static_cast<std::size_t>(kMonths)) throw std::domain_error("theta must have 12 entries");
  for (double th : theta)
    if (!(th > 0.0)) throw std::domain_error("seasonal effects must be positive");
  if (season_of.size() < T) throw std::domain_error("season map shorter than series length");

  int prev = 0;
  if (y0) {
    if (*y0 < 0) throw std::domain_error("initial state must be nonnegative");
    prev = *y0;
  } else if (alpha < 1.0) {
    prev = draw_poisson(rng, lambda * theta[season_of.empty() ? 0 : season_of[0] - 1] / (1.0 - alpha));
  }

  std::vector<int> y(T);
  if (innovations) innovations->assign(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    const int survivors = binomial_thin(prev, alpha, rng);
    const int eps = draw_poisson(rng, lambda * theta[season_of[t] - 1]);
    y[t] = survivors + eps;
    if (innovations) (*innovations)[t] = eps;
    prev = y[t];
  }
  return y;
}

SimulatedPanel simulate_panel(const PanelSpec& spec, Rng& rng) {
  const std::size_t L = spec.membership.size();
  if (L == 0) throw std::domain_error("panel needs at least one series");
  if (spec.alpha.size() != L) throw std::domain_error("alpha length differs from membership length");
  if (spec.exposure && spec.exposure->size() != L)
    throw std::domain_error("exposure length differs from membership length");
  for (int k : spec.membership)
    if (k < 0 || static_cast<std::size_t>(k) >= spec.cluster_rates.size())
      throw std::domain_error("membership references a missing cluster");

  const WeeklyCalendar cal = weekly_calendar(spec.origin, spec.T);

  SimulatedPanel out;
  CountPanel& panel = out.panel;
  panel.counts = CountMatrix(L, spec.T);
  panel.season_of = cal.season_of;
  panel.week_start = cal.week_start;
  panel.exposure = spec.exposure;
  panel.series_ids.reserve(L);

  ModelState& truth = out.truth;
  truth.alpha = spec.alpha;
  truth.z = spec.membership;
  truth.phi_star = spec.cluster_rates;
  truth.theta = spec.theta;
  truth.innovations = CountMatrix(L, spec.T);

  std::vector<int> eps;
  for (std::size_t l = 0; l < L; ++l) {
    double lambda = spec.cluster_rates[static_cast<std::size_t>(spec.membership[l])];
    if (spec.exposure) lambda *= (*spec.exposure)[l];
    const std::vector<int> y =
        simulate_poinar(lambda, spec.alpha[l], spec.theta, cal.season_of, spec.T, std::nullopt, rng, &eps);
    for (std::size_t t = 0; t < spec.T; ++t) {
      panel.counts(l, t) = y[t];
      truth.innovations(l, t) = eps[t];
    }
    panel.series_ids.push_back("s" + std::to_string(l + 1));
  }
  return out;
}

std::vector<int> crp_draw(std::size_t n, double tau, Rng& rng) {
  if (n == 0) throw std::domain_error("crp_draw needs at least one item");
  if (!(tau > 0.0)) throw std::domain_error("concentration must be positive");
  std::vector<int> z(n);
  std::vector<std::size_t> sizes{1};
  z[0] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    double u = draw_uniform(rng) * (static_cast<double>(i) + tau);
    std::size_t k = 0;
    for (; k < sizes.size(); ++k) {
      u -= static_cast<double>(sizes[k]);
      if (u < 0.0) break;
    }
    if (k == sizes.size()) sizes.push_back(0);
    ++sizes[k];
    z[i] = static_cast<int>(k);
  }
  return z;
}

StickBreaking stick_breaking(double tau, std::size_t truncation, Rng& rng) {
  if (!(tau > 0.0)) throw std::domain_error("concentration must be positive");
  if (truncation == 0) throw std::domain_error("truncation must be at least 1");
  StickBreaking sb;
  sb.weights.reserve(truncation);
  double remaining = 1.0;
  for (std::size_t k = 0; k < truncation; ++k) {
    const double nu = draw_beta(rng, 1.0, tau);
    sb.weights.push_back(nu * remaining);
    remaining *= 1.0 - nu;
  }
  sb.remainder = remaining;
  return sb;
}

double crp_expected_clusters(std::size_t n, double tau) {
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += tau / (tau + static_cast<double>(i));
  return e;
}

}  // namespace poinar
