#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace poinar {

inline constexpr int kMonths = 12;

/// Thrown on malformed input files, with row/column context in the message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a run is configured inconsistently (e.g. covariate mode
/// without exposures).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major L x T matrix of nonnegative counts.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::size_t rows, std::size_t cols, int fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  int operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const int* row(std::size_t r) const { return data_.data() + r * cols_; }
  int* row(std::size_t r) { return data_.data() + r * cols_; }

  const std::vector<int>& values() const { return data_; }

  bool operator==(const CountMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> data_;
};

/// Observed counts for L series over T weeks.
///
/// `season_of[t]` is the month (1..12) of week t (0-based). When the panel
/// came from a dated CSV, `week_start` holds the first day of every week and
/// the season map is the calendar month of that day.
struct CountPanel {
  CountMatrix counts;
  std::vector<int> season_of;
  std::optional<std::vector<double>> exposure;
  std::vector<std::string> series_ids;
  std::vector<std::chrono::sys_days> week_start;

  std::size_t num_series() const { return counts.rows(); }
  std::size_t num_weeks() const { return counts.cols(); }

  /// Month of week T-1+h, i.e. h weeks past the last observation.
  int season_ahead(int h) const;

  /// First `weeks` columns; exposure and ids carried over.
  CountPanel head(std::size_t weeks) const;

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Occurrence counts of each month in a season map.
struct SeasonSummary {
  std::vector<int> q;  // length 12, q[m-1]

  static SeasonSummary from(const std::vector<int>& season_of);
  /// Theta = sum_t theta_{s(t)} = sum_m q_m theta_m.
  double theta_total(const std::vector<double>& theta) const;
};

enum class RateMode { plain, covariate };

struct Hyperparams {
  double eta1 = 1.0, eta2 = 1.0;      // Beta prior on thinning
  double xi1 = 1.0, xi2 = 1.0;        // Gamma prior on seasonals (shape, rate)
  double gamma1 = 1.0, gamma2 = 0.1;  // base measure G0 (shape, rate)
  double a_tau = 2.0, b_tau = 4.0;    // Gamma prior on concentration
  RateMode mode = RateMode::plain;

  /// Defaults for the exposure-adjusted model (G0 = Gamma(0.5, 0.5)).
  static Hyperparams covariate_defaults();
  void validate() const;
};

/// One full parameter configuration of the sampler. Clusters are 0-based
/// internally and contiguous (no empty cluster).
struct ModelState {
  std::vector<double> alpha;     // length L
  std::vector<int> z;            // length L, values in [0, K)
  std::vector<double> phi_star;  // length K; psi in covariate mode
  std::vector<double> theta;     // length 12
  double tau = 1.0;
  CountMatrix innovations;       // L x T

  std::size_t num_clusters() const { return phi_star.size(); }

  /// lambda_l = w_l * phi*_{z_l}, with w_l = X_l in covariate mode, 1 otherwise.
  std::vector<double> series_rates(const std::vector<double>* exposure = nullptr) const;
};

std::string to_string(RateMode mode);
RateMode parse_rate_mode(const std::string& s);

}  // namespace poinar
