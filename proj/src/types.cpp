#include "poinar/types.hpp"

#include <numeric>

namespace poinar {

int CountPanel::season_ahead(int h) const {
  using namespace std::chrono;
  if (!week_start.empty()) {
    const sys_days day = week_start.back() + days{7 * h};
    return static_cast<int>(static_cast<unsigned>(year_month_day{day}.month()));
  }
  // Undated panels carry the last observed month forward.
  return season_of.empty() ? 1 : season_of.back();
}

CountPanel CountPanel::head(std::size_t weeks) const {
  if (weeks > num_weeks()) throw std::invalid_argument("head: weeks exceeds panel length");
  CountPanel out;
  out.counts = CountMatrix(num_series(), weeks);
  for (std::size_t l = 0; l < num_series(); ++l)
    for (std::size_t t = 0; t < weeks; ++t) out.counts(l, t) = counts(l, t);
  out.season_of.assign(season_of.begin(), season_of.begin() + static_cast<long>(weeks));
  if (!week_start.empty())
    out.week_start.assign(week_start.begin(), week_start.begin() + static_cast<long>(weeks));
  out.exposure = exposure;
  out.series_ids = series_ids;
  return out;
}

void CountPanel::validate() const {
  if (num_series() == 0 || num_weeks() == 0) throw std::invalid_argument("panel is empty");
  for (int v : counts.values())
    if (v < 0) throw std::invalid_argument("panel contains a negative count");
  if (season_of.size() != num_weeks())
    throw std::invalid_argument("season map length differs from number of weeks");
  for (int m : season_of)
    if (m < 1 || m > kMonths) throw std::invalid_argument("season map value outside 1..12");
  if (exposure) {
    if (exposure->size() != num_series())
      throw std::invalid_argument("exposure length differs from number of series");
    for (double x : *exposure)
      if (!(x > 0.0)) throw std::invalid_argument("exposure must be strictly positive");
  }
  if (!series_ids.empty() && series_ids.size() != num_series())
    throw std::invalid_argument("series_ids length differs from number of series");
  if (!week_start.empty() && week_start.size() != num_weeks())
    throw std::invalid_argument("week_start length differs from number of weeks");
}

SeasonSummary SeasonSummary::from(const std::vector<int>& season_of) {
  SeasonSummary s;
  s.q.assign(kMonths, 0);
  for (int m : season_of) {
    if (m < 1 || m > kMonths) throw std::invalid_argument("season map value outside 1..12");
    ++s.q[m - 1];
  }
  return s;
}

double SeasonSummary::theta_total(const std::vector<double>& theta) const {
  double total = 0.0;
  for (int m = 0; m < kMonths; ++m) total += q[m] * theta[m];
  return total;
}

Hyperparams Hyperparams::covariate_defaults() {
  Hyperparams h;
  h.gamma1 = 0.5;
  h.gamma2 = 0.5;
  h.mode = RateMode::covariate;
  return h;
}

void Hyperparams::validate() const {
  for (double v : {eta1, eta2, xi1, xi2, gamma1, gamma2, a_tau, b_tau})
    if (!(v > 0.0)) throw std::invalid_argument("hyperparameters must be strictly positive");
}

std::vector<double> ModelState::series_rates(const std::vector<double>* exposure) const {
  std::vector<double> rates(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    rates[l] = phi_star[static_cast<std::size_t>(z[l])];
    if (exposure) rates[l] *= (*exposure)[l];
  }
  return rates;
}

std::string to_string(RateMode mode) { return mode == RateMode::plain ? "plain" : "covariate"; }

RateMode parse_rate_mode(const std::string& s) {
  if (s == "plain") return RateMode::plain;
  if (s == "covariate") return RateMode::covariate;
  throw ConfigError("unknown mode '" + s + "' (expected plain or covariate)");
}

}  // namespace poinar
