#pragma once

#include <map>
#include <vector>

#include "poinar/gibbs.hpp"

namespace poinar {

/// Potential scale reduction factor over >= 2 equal-length chains:
/// sqrt(((n-1)/n W + B/n) / W). Returns +inf when W = 0 < B and 1 when both vanish.
double psrf(const std::vector<std::vector<double>>& chains);

/// Minimum-cost assignment of rows to columns for a rectangular cost matrix
/// (rows <= cols or rows > cols). Returns the column of each row, or -1.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

/// Fraction of series whose label disagrees after the best injective mapping
/// of estimated labels onto true labels.
double hamming_error(const std::vector<int>& z_est, const std::vector<int>& z_true);

/// Index into draws.draws of the draw with minimum average Hamming error
/// against all draws; ties go to the earliest (chain, iteration).
std::size_t representative_index(const PosteriorDraws& draws);
std::vector<int> representative_assignment(const PosteriorDraws& draws);

struct ClusterHistogram {
  std::map<int, double> frequency;  // K -> share of draws
  int mode = 0;
};
ClusterHistogram cluster_count_histogram(const PosteriorDraws& draws);
ClusterHistogram cluster_count_histogram(const std::vector<int>& counts);

struct GroupStats {
  std::size_t n = 0;
  double frequency = 0.0;
  double rmse = 0.0;
  double rmse_se = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
};

/// Forecast accuracy, overall and broken down by the last observed count.
struct EvalReport {
  double rmse = 0.0;
  double rmse_se = 0.0;
  double ape = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
  std::size_t n = 0;
  std::size_t ape_n = 0;          // entries with truth > 0
  std::size_t ape_skipped = 0;    // entries with truth == 0
  std::map<int, GroupStats> by_last_value;
  int last_value_cap = -1;        // last values >= cap pooled under cap; -1 = no pooling
};

/// rmse = sqrt(mean (pred - truth)^2), bias = mean (pred - truth),
/// ape = mean |pred - truth| / truth over truth > 0. Standard errors:
/// sd / sqrt(n) for bias, the delta method for RMSE.
EvalReport forecast_metrics(const std::vector<double>& predictions, const std::vector<double>& truths,
                            const std::vector<int>& last_values, int last_value_cap = -1);

}  // namespace poinar
