#include "poinar/study.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "poinar/cls.hpp"
#include "poinar/forecast.hpp"

namespace poinar {

PanelSpec Scenario::panel_spec(std::size_t series, Rng& rng, const Hyperparams& hyper) const {
  const std::size_t K = cluster_rates.size();
  if (K == 0 || series % K != 0) throw std::invalid_argument("series count must divide evenly into clusters");
  PanelSpec spec;
  spec.cluster_rates = cluster_rates;
  spec.T = T;
  spec.membership.resize(series);
  for (std::size_t l = 0; l < series; ++l) spec.membership[l] = static_cast<int>(l / (series / K));
  spec.alpha.assign(series, thinning);
  if (theta_mode == ThetaMode::sampled)
    for (double& th : spec.theta) th = draw_gamma(rng, hyper.xi1, hyper.xi2);
  return spec;
}

std::vector<Scenario> benchmark_scenarios() {
  const std::vector<std::pair<std::string, std::vector<double>>> rate_sets = {
      {"easy", {1.0, 3.0, 6.0, 10.0}},
      {"medium", {0.01, 0.5, 1.2, 2.0}},
      {"hard", {0.1, 0.2, 0.3, 0.6}},
  };
  std::vector<Scenario> out;
  std::uint64_t seed = 1;
  for (double thin : {0.1, 0.5, 0.9}) {
    for (const auto& [label, rates] : rate_sets) {
      Scenario s;
      std::ostringstream name;
      name << label << '-' << thin;
      s.name = name.str();
      s.cluster_rates = rates;
      s.thinning = thin;
      s.seed = seed++;
      out.push_back(s);
    }
  }
  Scenario single;
  single.name = "single";
  single.cluster_rates = {1.0};
  single.thinning = 0.5;
  single.seed = seed;
  out.push_back(single);
  return out;
}

PanelSpec crime_like_spec(std::size_t L, std::size_t T, bool with_exposure, Rng& rng) {
  PanelSpec spec;
  spec.cluster_rates = {0.05, 0.15, 0.3, 0.6, 1.0};
  const std::vector<double> shares = {0.35, 0.3, 0.2, 0.1, 0.05};
  spec.T = T;
  spec.membership.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    double u = draw_uniform(rng);
    std::size_t k = 0;
    while (k + 1 < shares.size() && u >= shares[k]) u -= shares[k++];
    spec.membership[l] = static_cast<int>(k);
  }
  spec.alpha.resize(L);
  for (double& a : spec.alpha) a = 0.05 + 0.35 * draw_uniform(rng);
  for (double& th : spec.theta) th = draw_gamma(rng, 20.0, 20.0);
  if (with_exposure) {
    std::vector<double> x(L);
    for (double& v : x) v = 0.5 + 1.5 * draw_uniform(rng);
    spec.exposure = std::move(x);
  }
  return spec;
}

Scenario find_scenario(const std::string& name) {
  for (const Scenario& s : benchmark_scenarios())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

const MethodScore& ScenarioResult::score(const std::string& method) const {
  for (const MethodScore& s : scores)
    if (s.method == method) return s;
  throw std::out_of_range("no score for method " + method);
}

namespace {

struct ReplicateOutput {
  std::vector<double> truth, bnp, cls, spp;
  int modal_k = 0;
  double mean_hamming = 0.0;
  double representative_hamming = 0.0;
  int cls_fallbacks = 0;
};

ReplicateOutput run_replicate(const Scenario& scenario, std::size_t L, const SamplerConfig& base,
                              std::uint64_t master, int replicate) {
  Rng rng(derive_seed(master, scenario.seed, static_cast<std::uint64_t>(replicate), 0));
  const PanelSpec spec = scenario.panel_spec(L, rng, base.hyper);
  const SimulatedPanel sim = simulate_panel(spec, rng);
  const CountPanel& panel = sim.panel;

  SamplerConfig config = base;
  config.seed = derive_seed(master, scenario.seed, static_cast<std::uint64_t>(replicate), 1);
  const PosteriorDraws draws = run_chains(panel, config);

  ReplicateOutput out;
  const std::size_t T = panel.num_weeks();
  const int season_next = panel.season_ahead(1);
  const std::vector<int> future{season_next};
  std::vector<int> series(T);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t t = 0; t < T; ++t) series[t] = panel.counts(l, t);
    const int y_T = series.back();
    const double lambda = spec.cluster_rates[static_cast<std::size_t>(spec.membership[l])];
    out.truth.push_back(conditional_mean_one_step(y_T, spec.alpha[l], lambda,
                                                  spec.theta[static_cast<std::size_t>(season_next - 1)]));
    out.bnp.push_back(posterior_mean_forecast(y_T, draws, l, season_next));
    try {
      out.cls.push_back(cls_forecast(cls_fit(series, panel.season_of), y_T, future, 1));
    } catch (const DegenerateFit&) {
      out.cls.push_back(0.0);
      ++out.cls_fallbacks;
    }
    out.spp.push_back(spp_fit_forecast(series));
  }

  out.modal_k = cluster_count_histogram(draws).mode;
  double h = 0.0;
  for (const Draw& d : draws.draws) h += hamming_error(d.z, spec.membership);
  out.mean_hamming = h / static_cast<double>(draws.draws.size());
  out.representative_hamming = hamming_error(representative_assignment(draws), spec.membership);
  return out;
}

MethodScore score(const std::string& method, const std::vector<double>& pred, const std::vector<double>& truth) {
  MethodScore s;
  s.method = method;
  double sq = 0.0, ape = 0.0;
  std::size_t ape_n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    sq += e * e;
    if (truth[i] > 0.0) {
      ape += std::abs(e) / truth[i];
      ++ape_n;
    }
  }
  s.rmse = std::sqrt(sq / static_cast<double>(pred.size()));
  s.ape = ape_n ? ape / static_cast<double>(ape_n) : 0.0;
  return s;
}

}  // namespace

StudyReport run_study(const std::vector<Scenario>& scenarios, const SamplerConfig& config,
                      const StudyOptions& options) {
  const int replicates = options.replicates > 0 ? options.replicates : (options.scale == StudyScale::desk ? 3 : 1);
  const std::size_t S = scenarios.size();
  const std::size_t jobs = S * static_cast<std::size_t>(replicates);
  std::vector<ReplicateOutput> outputs(jobs);
  std::vector<std::exception_ptr> errors(jobs);

  SamplerConfig inner = config;
  inner.parallel_innovations = false;  // parallelism lives at the job level

#pragma omp parallel for schedule(dynamic, 1)
  for (long job = 0; job < static_cast<long>(jobs); ++job) {
    const auto j = static_cast<std::size_t>(job);
    const Scenario& sc = scenarios[j / static_cast<std::size_t>(replicates)];
    const int rep = static_cast<int>(j % static_cast<std::size_t>(replicates));
    const std::size_t L = options.scale == StudyScale::desk
                              ? options.desk_series - options.desk_series % sc.cluster_rates.size()
                              : sc.L;
    try {
      outputs[j] = run_replicate(sc, L, inner, options.seed, rep);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  StudyReport report;
  for (std::size_t s = 0; s < S; ++s) {
    ScenarioResult res;
    res.scenario = scenarios[s].name;
    res.replicates = replicates;
    std::vector<double> truth, bnp, cls, spp;
    for (int r = 0; r < replicates; ++r) {
      const ReplicateOutput& o = outputs[s * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(r)];
      truth.insert(truth.end(), o.truth.begin(), o.truth.end());
      bnp.insert(bnp.end(), o.bnp.begin(), o.bnp.end());
      cls.insert(cls.end(), o.cls.begin(), o.cls.end());
      spp.insert(spp.end(), o.spp.begin(), o.spp.end());
      res.modal_clusters.push_back(o.modal_k);
      res.mean_hamming.push_back(o.mean_hamming);
      res.representative_hamming.push_back(o.representative_hamming);
      res.cls_fallbacks += o.cls_fallbacks;
      res.series = o.truth.size();
    }
    res.scores = {score("BNP", bnp, truth), score("CLS", cls, truth), score("SPP", spp, truth)};
    double tm = 0.0;
    for (double v : truth) tm += v;
    res.true_mean = tm / static_cast<double>(truth.size());
    report.results.push_back(std::move(res));
  }
  return report;
}

std::string StudyReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "scenario,method,rmse,ape\n";
  for (const ScenarioResult& r : results) {
    for (const MethodScore& s : r.scores) os << r.scenario << ',' << s.method << ',' << s.rmse << ',' << s.ape << '\n';
    os << r.scenario << ",TRUE_MEAN," << r.true_mean << ",\n";
  }
  return os.str();
}

std::string StudyReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const ScenarioResult& r : results) {
    nlohmann::json row;
    row["scenario"] = r.scenario;
    row["series"] = r.series;
    row["replicates"] = r.replicates;
    for (const MethodScore& s : r.scores) row["methods"][s.method] = {{"rmse", s.rmse}, {"ape", s.ape}};
    row["true_mean"] = r.true_mean;
    row["modal_clusters"] = r.modal_clusters;
    row["mean_hamming"] = r.mean_hamming;
    row["representative_hamming"] = r.representative_hamming;
    row["cls_fallbacks"] = r.cls_fallbacks;
    j.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace poinar
