#pragma once

#include <optional>
#include <vector>

#include "poinar/types.hpp"

namespace poinar {

/// Conditional least squares fit of one series:
///   min sum_{t>=2} (y_t - alpha y_{t-1} - lambda theta_{s(t)})^2  s.t. sum theta = 1.
struct ClsEstimate {
  double alpha = 0.2;
  double lambda = 1.0;
  std::vector<double> theta = std::vector<double>(kMonths, 1.0 / kMonths);
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
  bool projected = false;  // some theta ended on the floor
  std::vector<double> sse_trace;  // SSE after every block update
};

struct ClsOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double theta_floor = 1e-8;
  bool record_trace = false;
};

/// Thrown by cls_fit when the series carries no information (all zeros).
class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default starting point: alpha = 0.2, lambda = series mean, theta = 1/12.
ClsEstimate cls_initial(const std::vector<int>& series);

/// Cyclic updates of (lambda, alpha) then theta until the largest parameter
/// change drops below `tol`. Months absent from weeks 2..T keep their
/// starting theta and are excluded from the constrained update.
ClsEstimate cls_fit(const std::vector<int>& series, const std::vector<int>& season_of,
                    std::optional<ClsEstimate> init = std::nullopt, const ClsOptions& options = {});

/// Sum of squared one-step errors for given parameters.
double cls_sse(const std::vector<int>& series, const std::vector<int>& season_of, double alpha, double lambda,
               const std::vector<double>& theta);

/// Plug-in h-step conditional mean; `future_seasons[j-1]` is the month of week T+j.
double cls_forecast(const ClsEstimate& est, int y_T, const std::vector<int>& future_seasons, int h);

/// Simple Poisson process predictor: the sample mean.
double spp_fit_forecast(const std::vector<int>& series);

}  // namespace poinar
