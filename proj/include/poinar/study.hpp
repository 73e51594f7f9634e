#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poinar/diagnostics.hpp"
#include "poinar/gibbs.hpp"
#include "poinar/simulate.hpp"

namespace poinar {

enum class ThetaMode { unit, sampled };

/// One simulation design: equal-size clusters with shared rates and a
/// common thinning value.
struct Scenario {
  std::string name;
  std::vector<double> cluster_rates;
  double thinning = 0.5;
  std::size_t L = 100;
  std::size_t T = 208;
  ThetaMode theta_mode = ThetaMode::unit;
  std::uint64_t seed = 1;

  /// Ground-truth panel design for a given series count (L must divide evenly).
  PanelSpec panel_spec(std::size_t series, Rng& rng, const Hyperparams& hyper = {}) const;
};

/// The 3 x 3 grid (easy/medium/hard rates x thinning 0.1/0.5/0.9) followed by
/// the single-cluster sanity scenario; 10 in total.
std::vector<Scenario> benchmark_scenarios();

/// A panel shaped like a city's weekly low-count crime series: unequal
/// cluster sizes, heterogeneous thinning, mild monthly seasonality and,
/// optionally, exposures X_l ~ U(0.5, 2) scaling every rate.
PanelSpec crime_like_spec(std::size_t L, std::size_t T, bool with_exposure, Rng& rng);

/// Looks up a scenario by name ("easy-0.5", "hard-0.9", "single", ...).
Scenario find_scenario(const std::string& name);

enum class StudyScale { full, desk };

struct StudyOptions {
  StudyScale scale = StudyScale::desk;
  std::size_t desk_series = 40;
  int replicates = 0;  // 0 = scale default (desk 3, full 1)
  std::uint64_t seed = 2024;
};

struct MethodScore {
  std::string method;
  double rmse = 0.0;
  double ape = 0.0;
};

struct ScenarioResult {
  std::string scenario;
  std::size_t series = 0;
  int replicates = 0;
  std::vector<MethodScore> scores;  // BNP, CLS, SPP
  double true_mean = 0.0;           // average true E(Y_{.,T+1} | y_T)
  std::vector<int> modal_clusters;  // per replicate
  std::vector<double> mean_hamming; // per replicate, over stored draws
  std::vector<double> representative_hamming;
  int cls_fallbacks = 0;            // all-zero series predicted as 0

  const MethodScore& score(const std::string& method) const;
};

struct StudyReport {
  std::vector<ScenarioResult> results;
  std::string to_csv() const;
  std::string to_json() const;
};

/// Simulates every scenario x replicate, fits BNP/CLS/SPP and scores their
/// one-step predictions against the true conditional mean.
StudyReport run_study(const std::vector<Scenario>& scenarios, const SamplerConfig& config,
                      const StudyOptions& options = {});

}  // namespace poinar
