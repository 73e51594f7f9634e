#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poinar/diagnostics.hpp"
#include "poinar/gibbs.hpp"

namespace poinar {

/// Which weeks to forecast, one step ahead, after the training window.
enum class TargetRule {
  next,                // only week train_weeks (the first week after training)
  first_week_of_month, // holdout weeks whose start date falls on day 1..7
  all                  // every holdout week
};
TargetRule parse_target_rule(const std::string& s);

struct ForecastRow {
  std::string series_id;
  std::size_t series = 0;
  std::size_t target = 0;      // 0-based week index being forecast
  std::string target_date;     // empty for undated panels
  int last_value = 0;          // observed count at target - 1
  std::string method;          // BNP, CLS or SPP
  double mean = 0.0;
  std::vector<std::optional<int>> quantiles;  // BNP only
  std::optional<int> actual;   // known when target lies inside the panel
};

struct ForecastRequest {
  std::size_t train_weeks = 0;  // 0 = whole panel
  TargetRule targets = TargetRule::next;
  std::vector<double> quantiles{0.5, 0.95, 0.99};
  std::vector<std::string> methods{"BNP"};
};

/// Each target is predicted from the observed count just before it, with
/// BNP averaging the one-step conditional mean over draws and CLS/SPP fit on
/// the training window.
std::vector<ForecastRow> make_forecasts(const CountPanel& panel, const PosteriorDraws* draws,
                                        const ForecastRequest& request);

std::string format_forecasts(const std::vector<ForecastRow>& rows, const std::vector<double>& quantiles);
std::vector<ForecastRow> parse_forecasts(const std::string& text);

/// Scores forecast rows against the panel's observed counts, per method.
std::map<std::string, EvalReport> evaluate_forecasts(const std::vector<ForecastRow>& rows, const CountPanel& panel,
                                                     int last_value_cap = 4);

/// Parses "0.5,0.95,0.99"; throws ConfigError unless strictly increasing in (0,1).
std::vector<double> parse_quantile_list(const std::string& s);

}  // namespace poinar
