#pragma once

#include <optional>
#include <vector>

#include "poinar/gibbs.hpp"

namespace poinar {

/// Truncated predictive pmf over 0..y_max.
struct ForecastDistribution {
  enum class Source { per_draw, posterior_averaged };

  std::vector<double> pmf;
  double mean = 0.0;  // exact conditional mean (not the truncated pmf mean)
  Source source = Source::per_draw;

  int y_max() const { return static_cast<int>(pmf.size()) - 1; }
  double mass() const;
};

/// Tail mass left beyond y_max by the automatic truncation.
inline constexpr double kTailBudget = 1e-9;

/// alpha * y_T + lambda * theta_next.
double conditional_mean_one_step(int y_T, double alpha, double lambda, double theta_next);

/// alpha^h y_T + lambda * sum_{j=1..h} alpha^{h-j} theta_{s(T+j)}, computed by
/// iterating the one-step mean. `future_seasons[j-1]` is the month of week T+j.
double conditional_mean_h_step(int y_T, double alpha, double lambda, const std::vector<double>& theta,
                               const std::vector<int>& future_seasons, int h);

/// Exact pmf of alpha o y_T + Poisson(lambda * theta_next). `y_max` is a
/// starting point; the support is extended until the tail is below kTailBudget.
ForecastDistribution predictive_pmf(int y_T, double alpha, double lambda, double theta_next,
                                    std::optional<int> y_max = std::nullopt);

/// Pointwise average of per-draw predictive pmfs for series l, forecasting a
/// week in month `season`.
ForecastDistribution posterior_predictive(int y_T, const PosteriorDraws& draws, std::size_t l, int season,
                                          std::optional<int> y_max = std::nullopt);

/// Smallest y with CDF(y) >= upsilon; throws std::domain_error outside (0,1).
int quantile(const ForecastDistribution& dist, double upsilon);

/// Draw-averaged one-step conditional mean for series l.
double posterior_mean_forecast(int y_T, const PosteriorDraws& draws, std::size_t l, int season);

}  // namespace poinar
