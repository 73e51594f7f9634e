#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "poinar/random.hpp"
#include "poinar/types.hpp"

namespace poinar {

/// alpha o x: number of successes in x Bernoulli(alpha) trials.
int binomial_thin(int x, double alpha, Rng& rng);

/// Stationary mean lambda / (1 - alpha) of a PoINAR(1) with unit seasonals.
double stationary_mean(double lambda, double alpha);

/// Weekly calendar starting at `first`: week-start dates and their months.
struct WeeklyCalendar {
  std::vector<std::chrono::sys_days> week_start;
  std::vector<int> season_of;
};
WeeklyCalendar weekly_calendar(std::chrono::sys_days first, std::size_t weeks);
/// 2001-01-01, the default origin of simulated panels.
std::chrono::sys_days default_origin();

/// Simulates Y_1..Y_T with Y_{t+1} = alpha o Y_t + Poisson(lambda * theta_{s(t+1)}).
/// Without `y0` the initial state is Poisson(lambda * theta_{s(1)} / (1 - alpha)).
std::vector<int> simulate_poinar(double lambda, double alpha, const std::vector<double>& theta,
                                 const std::vector<int>& season_of, std::size_t T,
                                 std::optional<int> y0, Rng& rng);

/// Same recursion, also returning the innovation drawn at every step.
std::vector<int> simulate_poinar(double lambda, double alpha, const std::vector<double>& theta,
                                 const std::vector<int>& season_of, std::size_t T,
                                 std::optional<int> y0, Rng& rng, std::vector<int>* innovations);

/// Ground-truth parameters for a simulated panel.
struct PanelSpec {
  std::vector<double> cluster_rates;    // per cluster; psi when exposure is set
  std::vector<int> membership;          // length L, 0-based cluster index
  std::vector<double> alpha;            // length L
  std::vector<double> theta = std::vector<double>(kMonths, 1.0);
  std::size_t T = 208;
  std::chrono::sys_days origin = default_origin();
  std::optional<std::vector<double>> exposure;
};

struct SimulatedPanel {
  CountPanel panel;
  ModelState truth;  // z, phi_star, alpha, theta and the drawn innovations
};

SimulatedPanel simulate_panel(const PanelSpec& spec, Rng& rng);

/// Sequential CRP draw of n memberships (0-based, first item in cluster 0).
std::vector<int> crp_draw(std::size_t n, double tau, Rng& rng);

struct StickBreaking {
  std::vector<double> weights;
  double remainder = 1.0;  // 1 - sum(weights)
};

/// Truncated GEM(tau) weights.
StickBreaking stick_breaking(double tau, std::size_t truncation, Rng& rng);

/// E[number of clusters] of a CRP with n items: sum_i tau / (tau + i - 1).
double crp_expected_clusters(std::size_t n, double tau);

}  // namespace poinar
