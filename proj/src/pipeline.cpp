#include "poinar/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "poinar/cls.hpp"
#include "poinar/forecast.hpp"
#include "poinar/io.hpp"

namespace poinar {

TargetRule parse_target_rule(const std::string& s) {
  if (s == "next") return TargetRule::next;
  if (s == "first-week-of-month") return TargetRule::first_week_of_month;
  if (s == "all") return TargetRule::all;
  throw ConfigError("unknown target rule '" + s + "' (expected next, first-week-of-month or all)");
}

std::vector<double> parse_quantile_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad quantile '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("bad quantile '" + item + "'");
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("quantiles must lie in (0,1)");
    if (!out.empty() && !(v > out.back())) throw ConfigError("quantiles must be strictly increasing");
    out.push_back(v);
  }
  return out;
}

namespace {

std::vector<std::size_t> target_weeks(const CountPanel& panel, std::size_t train, TargetRule rule) {
  const std::size_t T = panel.num_weeks();
  std::vector<std::size_t> out;
  if (rule == TargetRule::next || train >= T) {
    out.push_back(train);
    return out;
  }
  for (std::size_t t = train; t < T; ++t) {
    if (rule == TargetRule::all) {
      out.push_back(t);
    } else if (!panel.week_start.empty()) {
      const unsigned day = static_cast<unsigned>(std::chrono::year_month_day{panel.week_start[t]}.day());
      if (day <= 7) out.push_back(t);
    } else if ((t - train) % 4 == 0) {
      out.push_back(t);
    }
  }
  return out;
}

int season_of_week(const CountPanel& panel, std::size_t t) {
  if (t < panel.num_weeks()) return panel.season_of[t];
  return panel.season_ahead(static_cast<int>(t - panel.num_weeks() + 1));
}

std::string date_of_week(const CountPanel& panel, std::size_t t) {
  if (panel.week_start.empty()) return {};
  return format_date(panel.week_start.front() + std::chrono::days{7 * static_cast<long>(t)});
}

}  // namespace

std::vector<ForecastRow> make_forecasts(const CountPanel& panel, const PosteriorDraws* draws,
                                        const ForecastRequest& request) {
  const std::size_t T = panel.num_weeks();
  const std::size_t train = request.train_weeks == 0 ? T : request.train_weeks;
  if (train > T || train < 1) throw ConfigError("training window outside the panel");
  const std::size_t L = panel.num_series();

  bool want_bnp = false, want_cls = false, want_spp = false;
  for (const std::string& m : request.methods) {
    if (m == "BNP") want_bnp = true;
    else if (m == "CLS") want_cls = true;
    else if (m == "SPP") want_spp = true;
    else throw ConfigError("unknown method '" + m + "' (expected BNP, CLS or SPP)");
  }
  if (want_bnp) {
    if (!draws || draws->draws.empty()) throw ConfigError("BNP forecasts need posterior draws");
    if (draws->num_series != L) throw ConfigError("draws were fit on a panel with a different number of series");
  }

  const std::vector<std::size_t> targets = target_weeks(panel, train, request.targets);
  std::vector<ForecastRow> rows;
  std::vector<int> series(train);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t t = 0; t < train; ++t) series[t] = panel.counts(l, t);
    std::optional<ClsEstimate> cls;
    if (want_cls) {
      try {
        cls = cls_fit(series, panel.season_of);
      } catch (const DegenerateFit&) {
        cls.reset();
      }
    }
    const double spp = want_spp ? spp_fit_forecast(series) : 0.0;

    for (std::size_t target : targets) {
      ForecastRow base;
      base.series_id = panel.series_ids.empty() ? "s" + std::to_string(l + 1) : panel.series_ids[l];
      base.series = l;
      base.target = target;
      base.target_date = date_of_week(panel, target);
      base.last_value = panel.counts(l, target - 1);
      if (target < T) base.actual = panel.counts(l, target);
      const int season = season_of_week(panel, target);

      if (want_bnp) {
        ForecastRow r = base;
        r.method = "BNP";
        const ForecastDistribution dist = posterior_predictive(base.last_value, *draws, l, season);
        r.mean = dist.mean;
        for (double q : request.quantiles) r.quantiles.emplace_back(quantile(dist, q));
        rows.push_back(std::move(r));
      }
      if (want_cls) {
        ForecastRow r = base;
        r.method = "CLS";
        r.mean = cls ? cls_forecast(*cls, base.last_value, {season}, 1) : 0.0;
        r.quantiles.assign(request.quantiles.size(), std::nullopt);
        rows.push_back(std::move(r));
      }
      if (want_spp) {
        ForecastRow r = base;
        r.method = "SPP";
        r.mean = spp;
        r.quantiles.assign(request.quantiles.size(), std::nullopt);
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_forecasts(const std::vector<ForecastRow>& rows, const std::vector<double>& quantiles) {
  std::ostringstream os;
  os << "series_id,target_week,target_date,last_value,method,mean";
  for (double q : quantiles) os << ",q" << shortest(q);
  os << ",actual\n";
  for (const ForecastRow& r : rows) {
    os << r.series_id << ',' << r.target << ',' << r.target_date << ',' << r.last_value << ',' << r.method << ','
       << shortest(r.mean);
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
      os << ',';
      if (i < r.quantiles.size() && r.quantiles[i]) os << *r.quantiles[i];
    }
    os << ',';
    if (r.actual) os << *r.actual;
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t row, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError(std::string("bad ") + what + " '" + s + "' in forecast row " + std::to_string(row));
  return v;
}

}  // namespace

std::vector<ForecastRow> parse_forecasts(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("forecast file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  if (header.size() < 7 || header[0] != "series_id" || header.back() != "actual")
    throw ParseError("unexpected forecast header");
  const std::size_t nq = header.size() - 7;
  std::vector<ForecastRow> rows;
  std::size_t rowno = 1;
  while (std::getline(is, line)) {
    ++rowno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line);
    if (c.size() != header.size()) throw ParseError("ragged forecast row " + std::to_string(rowno));
    ForecastRow r;
    r.series_id = c[0];
    r.target = parse_number<std::size_t>(c[1], rowno, "target_week");
    r.target_date = c[2];
    r.last_value = parse_number<int>(c[3], rowno, "last_value");
    r.method = c[4];
    r.mean = parse_number<double>(c[5], rowno, "mean");
    for (std::size_t i = 0; i < nq; ++i) {
      const std::string& q = c[6 + i];
      r.quantiles.push_back(q.empty() ? std::nullopt : std::optional<int>(parse_number<int>(q, rowno, "quantile")));
    }
    if (!c.back().empty()) r.actual = parse_number<int>(c.back(), rowno, "actual");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::map<std::string, EvalReport> evaluate_forecasts(const std::vector<ForecastRow>& rows, const CountPanel& panel,
                                                     int last_value_cap) {
  std::map<std::string, std::size_t> index;
  for (std::size_t l = 0; l < panel.num_series(); ++l)
    index[panel.series_ids.empty() ? "s" + std::to_string(l + 1) : panel.series_ids[l]] = l;

  struct Columns {
    std::vector<double> pred, truth;
    std::vector<int> last;
  };
  std::map<std::string, Columns> by_method;
  for (const ForecastRow& r : rows) {
    const auto it = index.find(r.series_id);
    if (it == index.end()) throw ConfigError("forecast for unknown series " + r.series_id);
    if (r.target >= panel.num_weeks()) throw ConfigError("holdout panel does not cover week " + std::to_string(r.target));
    Columns& c = by_method[r.method];
    c.pred.push_back(r.mean);
    c.truth.push_back(panel.counts(it->second, r.target));
    c.last.push_back(r.last_value);
  }
  std::map<std::string, EvalReport> out;
  for (const auto& [method, c] : by_method) out[method] = forecast_metrics(c.pred, c.truth, c.last, last_value_cap);
  return out;
}

}  // namespace poinar
