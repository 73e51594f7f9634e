#include "poinar/cls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "poinar/forecast.hpp"

namespace poinar {

namespace {

struct Design {
  const std::vector<int>& y;
  const std::vector<int>& season;
  std::vector<int> n;  // weeks t >= 2 per month
};

double max_abs_change(const ClsEstimate& a, const ClsEstimate& b) {
  double d = std::max(std::abs(a.alpha - b.alpha), std::abs(a.lambda - b.lambda));
  for (int m = 0; m < kMonths; ++m) d = std::max(d, std::abs(a.theta[m] - b.theta[m]));
  return d;
}

// Joint (alpha, lambda) minimizer for fixed theta, then alpha given lambda.
void update_alpha_lambda(const Design& d, ClsEstimate& e) {
  double syy = 0.0, sy1y1 = 0.0, syth = 0.0, sy1th = 0.0, sthth = 0.0;
  for (std::size_t t = 1; t < d.y.size(); ++t) {
    const double yt = d.y[t];
    const double y1 = d.y[t - 1];
    const double th = e.theta[static_cast<std::size_t>(d.season[t] - 1)];
    syy += yt * y1;
    sy1y1 += y1 * y1;
    syth += yt * th;
    sy1th += y1 * th;
    sthth += th * th;
  }
  const double den = sy1y1 * sthth - sy1th * sy1th;
  if (std::abs(den) > 1e-12 * std::max(1.0, sy1y1 * sthth)) e.lambda = (sy1y1 * syth - syy * sy1th) / den;
  if (sy1y1 > 0.0) e.alpha = (syy - e.lambda * sy1th) / sy1y1;
}

// Exact minimizer over theta >= floor with the present months summing to what
// the absent months leave: theta_m = max(floor, rbar_m / lambda - nu / (lambda^2 n_m)).
// Returns true if some month sits on the floor.
bool update_theta(const Design& d, ClsEstimate& e, double floor) {
  if (e.lambda == 0.0) return false;
  std::vector<double> rbar(kMonths, 0.0);
  for (std::size_t t = 1; t < d.y.size(); ++t)
    rbar[static_cast<std::size_t>(d.season[t] - 1)] += d.y[t] - e.alpha * d.y[t - 1];

  double target = 1.0;
  int present = 0;
  for (int m = 0; m < kMonths; ++m) {
    if (d.n[m] == 0) {
      target -= e.theta[m];
    } else {
      rbar[m] /= d.n[m];
      ++present;
    }
  }
  if (present == 0 || target < floor * present) return false;

  const double lam = e.lambda;
  auto free_value = [&](int m, double nu) { return rbar[m] / lam - nu / (lam * lam * d.n[m]); };
  auto total = [&](double nu) {
    double s = 0.0;
    for (int m = 0; m < kMonths; ++m)
      if (d.n[m] > 0) s += std::max(floor, free_value(m, nu));
    return s;
  };
  // total() is nonincreasing in nu; bracket then bisect to find the active set
  double lo = -1.0, hi = 1.0;
  while (total(lo) < target) lo *= 2.0;
  while (total(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) > target ? lo : hi) = mid;
  }
  const double nu0 = 0.5 * (lo + hi);

  // closed form for nu on the free months so the constraint holds to rounding
  double free_sum = 0.0, free_slope = 0.0, mass = target;
  std::vector<bool> active(kMonths, false);
  for (int m = 0; m < kMonths; ++m) {
    if (d.n[m] == 0) continue;
    if (free_value(m, nu0) <= floor) {
      active[m] = true;
      mass -= floor;
    } else {
      free_sum += rbar[m] / lam;
      free_slope += 1.0 / (lam * lam * d.n[m]);
    }
  }
  const double nu = free_slope > 0.0 ? (free_sum - mass) / free_slope : nu0;
  bool projected = false;
  for (int m = 0; m < kMonths; ++m) {
    if (d.n[m] == 0) continue;
    e.theta[m] = active[m] ? floor : std::max(floor, free_value(m, nu));
    projected = projected || e.theta[m] == floor;
  }
  return projected;
}

}  // namespace

double cls_sse(const std::vector<int>& series, const std::vector<int>& season_of, double alpha, double lambda,
               const std::vector<double>& theta) {
  double sse = 0.0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double r = series[t] - alpha * series[t - 1] - lambda * theta[static_cast<std::size_t>(season_of[t] - 1)];
    sse += r * r;
  }
  return sse;
}

ClsEstimate cls_initial(const std::vector<int>& series) {
  ClsEstimate e;
  e.alpha = 0.2;
  e.lambda = spp_fit_forecast(series);
  return e;
}

ClsEstimate cls_fit(const std::vector<int>& series, const std::vector<int>& season_of,
                    std::optional<ClsEstimate> init, const ClsOptions& options) {
  if (series.size() < 14) throw std::domain_error("CLS needs at least 14 observations");
  if (season_of.size() < series.size()) throw std::domain_error("season map shorter than series");
  if (std::all_of(series.begin(), series.end(), [](int v) { return v == 0; }))
    throw DegenerateFit("CLS fit of an identically zero series");

  Design d{series, season_of, std::vector<int>(kMonths, 0)};
  for (std::size_t t = 1; t < series.size(); ++t) ++d.n[static_cast<std::size_t>(season_of[t] - 1)];

  ClsEstimate e = init ? *init : cls_initial(series);
  e.iterations = 0;
  e.converged = false;
  e.projected = false;
  e.sse_trace.clear();
  if (options.record_trace) e.sse_trace.push_back(cls_sse(series, season_of, e.alpha, e.lambda, e.theta));

  for (int it = 1; it <= options.max_iter; ++it) {
    const ClsEstimate before = e;
    update_alpha_lambda(d, e);
    if (options.record_trace) e.sse_trace.push_back(cls_sse(series, season_of, e.alpha, e.lambda, e.theta));
    e.projected = update_theta(d, e, options.theta_floor) || e.projected;
    if (options.record_trace) e.sse_trace.push_back(cls_sse(series, season_of, e.alpha, e.lambda, e.theta));
    e.iterations = it;
    if (max_abs_change(before, e) < options.tol) {
      e.converged = true;
      break;
    }
  }
  e.sse = cls_sse(series, season_of, e.alpha, e.lambda, e.theta);
  return e;
}

double cls_forecast(const ClsEstimate& est, int y_T, const std::vector<int>& future_seasons, int h) {
  return conditional_mean_h_step(y_T, est.alpha, est.lambda, est.theta, future_seasons, h);
}

double spp_fit_forecast(const std::vector<int>& series) {
  if (series.empty()) throw std::domain_error("SPP needs at least one observation");
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

}  // namespace poinar
