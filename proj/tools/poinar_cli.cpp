// Command-line front end: simulate, fit, forecast, evaluate, study.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "poinar/diagnostics.hpp"
#include "poinar/gibbs.hpp"
#include "poinar/io.hpp"
#include "poinar/pipeline.hpp"
#include "poinar/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace poinar;

namespace {

constexpr const char* kVersion = "poinar 0.1.0";

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("POINAR_OUT_DIR")) return env;
  return "poinar-out";
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
  json m = {{"tool", kVersion}, {"command", command}, {"config", config}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

struct FitFlags {
  std::string panel, exposure, out, mode = "plain", strategy = "exact";
  int iterations = 5000, burn_in = 1000, thin = 50, chains = 5, threshold = 30;
  std::size_t train_weeks = 0;
  std::uint64_t seed = 1;
  bool keep_innovations = false, no_scale_move = false;
  Hyperparams hyper;
  bool hyper_gamma_set = false;
};

json sampler_json(const SamplerConfig& c) {
  const Hyperparams& h = c.hyper;
  return {{"iterations", c.n_iterations},
          {"burn_in", c.burn_in},
          {"thin", c.thin_interval},
          {"chains", c.n_chains},
          {"seed", c.seed},
          {"mode", to_string(h.mode)},
          {"strategy", c.innovation_strategy == InnovationStrategy::exact_enumeration ? "exact" : "metropolis"},
          {"metropolis_threshold", c.metropolis_threshold},
          {"scale_move", c.scale_move},
          {"hyper",
           {{"eta1", h.eta1}, {"eta2", h.eta2}, {"xi1", h.xi1}, {"xi2", h.xi2}, {"gamma1", h.gamma1},
            {"gamma2", h.gamma2}, {"a_tau", h.a_tau}, {"b_tau", h.b_tau}}}};
}

json diagnostics_json(const PosteriorDraws& draws) {
  json d;
  const ClusterHistogram hist = cluster_count_histogram(draws);
  json freq = json::object();
  for (const auto& [k, f] : hist.frequency) freq[std::to_string(k)] = f;
  d["cluster_count_histogram"] = freq;
  d["modal_clusters"] = hist.mode;
  const std::size_t rep = representative_index(draws);
  d["representative"] = {{"chain", draws.draws[rep].chain},
                         {"iteration", draws.draws[rep].iteration},
                         {"z", draws.draws[rep].z}};

  const int chains = draws.num_chains();
  if (chains >= 2) {
    std::vector<std::vector<double>> lam(static_cast<std::size_t>(chains));
    std::vector<std::vector<std::vector<double>>> alpha(draws.num_series,
                                                        std::vector<std::vector<double>>(static_cast<std::size_t>(chains)));
    std::vector<std::vector<std::vector<double>>> theta(kMonths,
                                                        std::vector<std::vector<double>>(static_cast<std::size_t>(chains)));
    for (int c = 0; c < chains; ++c)
      for (const Draw* dr : draws.chain(c)) {
        lam[static_cast<std::size_t>(c)].push_back(draws.lambda_sum(*dr));
        for (std::size_t l = 0; l < draws.num_series; ++l) alpha[l][static_cast<std::size_t>(c)].push_back(dr->alpha[l]);
        for (int m = 0; m < kMonths; ++m) theta[static_cast<std::size_t>(m)][static_cast<std::size_t>(c)].push_back(dr->theta[static_cast<std::size_t>(m)]);
      }
    d["psrf_lambda_sum"] = psrf(lam);
    json pa = json::array(), pt = json::array();
    for (const auto& a : alpha) pa.push_back(psrf(a));
    for (const auto& t : theta) pt.push_back(psrf(t));
    d["psrf_alpha"] = pa;
    d["psrf_theta"] = pt;
  } else {
    d["psrf_lambda_sum"] = nullptr;
  }
  return d;
}

int cmd_simulate(const std::string& scenario, std::uint64_t seed, const std::string& out_flag, std::size_t series,
                 std::size_t weeks, bool with_exposure) {
  const fs::path out = output_dir(out_flag);
  Rng rng(seed);
  PanelSpec spec;
  if (scenario == "crime-like") {
    spec = crime_like_spec(series ? series : 188, weeks ? weeks : 418, with_exposure, rng);
  } else {
    Scenario sc = find_scenario(scenario);
    if (weeks) sc.T = weeks;
    spec = sc.panel_spec(series ? series : sc.L, rng);
    if (with_exposure) {
      std::vector<double> x(spec.membership.size());
      for (double& v : x) v = 0.5 + 1.5 * draw_uniform(rng);
      spec.exposure = std::move(x);
    }
  }
  const SimulatedPanel sim = simulate_panel(spec, rng);
  save_counts(sim.panel, out / "counts.csv");
  if (sim.panel.exposure) write_file(out / "exposure.csv", format_exposure(sim.panel));
  write_file(out / "truth.json", truth_to_json(sim.truth).dump(2) + "\n");
  write_manifest(out, "simulate",
                 {{"scenario", scenario}, {"seed", seed}, {"series", sim.panel.num_series()},
                  {"weeks", sim.panel.num_weeks()}, {"with_exposure", with_exposure}});
  std::cout << "wrote " << sim.panel.num_series() << " x " << sim.panel.num_weeks() << " panel to " << out.string()
            << "\n";
  return 0;
}

int cmd_fit(FitFlags f) {
  const fs::path out = output_dir(f.out);
  CountPanel panel = load_counts(f.panel);
  if (!f.exposure.empty()) attach_exposure(panel, f.exposure);
  if (f.train_weeks) panel = panel.head(f.train_weeks);

  SamplerConfig config;
  config.n_iterations = f.iterations;
  config.burn_in = f.burn_in;
  config.thin_interval = f.thin;
  config.n_chains = f.chains;
  config.seed = f.seed;
  config.hyper = f.hyper;
  config.hyper.mode = parse_rate_mode(f.mode);
  if (config.hyper.mode == RateMode::covariate && !f.hyper_gamma_set) {
    const Hyperparams cov = Hyperparams::covariate_defaults();
    config.hyper.gamma1 = cov.gamma1;
    config.hyper.gamma2 = cov.gamma2;
  }
  if (config.hyper.mode == RateMode::covariate && !panel.exposure)
    throw ConfigError("--mode covariate requires --exposure");
  if (f.strategy == "exact") config.innovation_strategy = InnovationStrategy::exact_enumeration;
  else if (f.strategy == "metropolis") config.innovation_strategy = InnovationStrategy::metropolis_poisson;
  else throw ConfigError("unknown strategy '" + f.strategy + "'");
  config.metropolis_threshold = f.threshold;
  config.keep_innovations = f.keep_innovations;
  config.scale_move = !f.no_scale_move;

  const PosteriorDraws draws = run_chains(panel, config);
  save_draws(draws, out / "draws.jsonl");
  write_file(out / "diagnostics.json", diagnostics_json(draws).dump(2) + "\n");
  json cfg = sampler_json(config);
  cfg["panel"] = f.panel;
  cfg["exposure"] = f.exposure;
  cfg["train_weeks"] = panel.num_weeks();
  write_manifest(out, "fit", cfg);
  std::cout << "stored " << draws.draws.size() << " draws from " << config.n_chains << " chain(s) in "
            << (out / "draws.jsonl").string() << "\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

int cmd_forecast(const std::string& panel_path, const std::string& draws_path, const std::string& out_flag,
                 std::size_t train_weeks, const std::string& targets, const std::string& quantiles,
                 const std::string& methods) {
  const fs::path out = output_dir(out_flag);
  const CountPanel panel = load_counts(panel_path);
  ForecastRequest req;
  req.train_weeks = train_weeks;
  req.targets = parse_target_rule(targets);
  req.quantiles = parse_quantile_list(quantiles);
  req.methods = split_list(methods);
  std::optional<PosteriorDraws> draws;
  if (!draws_path.empty()) draws = load_draws(draws_path);
  const auto rows = make_forecasts(panel, draws ? &*draws : nullptr, req);
  write_file(out / "forecasts.csv", format_forecasts(rows, req.quantiles));
  write_manifest(out, "forecast",
                 {{"panel", panel_path}, {"draws", draws_path}, {"train_weeks", train_weeks}, {"targets", targets},
                  {"quantiles", req.quantiles}, {"methods", req.methods}});
  std::cout << "wrote " << rows.size() << " forecast rows to " << (out / "forecasts.csv").string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& forecasts_path, const std::string& panel_path, const std::string& out_flag,
                 int cap) {
  const fs::path out = output_dir(out_flag);
  const CountPanel panel = load_counts(panel_path);
  const auto rows = parse_forecasts(read_file(forecasts_path));
  const auto reports = evaluate_forecasts(rows, panel, cap);
  json j = json::object();
  std::string csv = "method,last_value,n,frequency,rmse,rmse_se,bias,bias_se\n";
  for (const auto& [method, r] : reports) {
    j[method] = report_to_json(r);
    csv += report_to_csv(method, r);
  }
  write_file(out / "report.json", j.dump(2) + "\n");
  write_file(out / "report.csv", csv);
  write_manifest(out, "evaluate", {{"forecasts", forecasts_path}, {"panel", panel_path}, {"last_value_cap", cap}});
  std::cout << csv;
  return 0;
}

int cmd_study(const std::string& scale, int replicates, std::size_t series, int iterations, int burn_in, int thin,
              std::uint64_t seed, const std::string& scenarios, const std::string& out_flag) {
  const fs::path out = output_dir(out_flag);
  StudyOptions opt;
  if (scale == "desk") opt.scale = StudyScale::desk;
  else if (scale == "full") opt.scale = StudyScale::full;
  else throw ConfigError("unknown scale '" + scale + "'");
  opt.replicates = replicates;
  if (series) opt.desk_series = series;
  opt.seed = seed;
  std::vector<Scenario> list;
  if (scenarios.empty()) list = benchmark_scenarios();
  else
    for (const std::string& name : split_list(scenarios)) list.push_back(find_scenario(name));
  SamplerConfig config;
  config.n_iterations = iterations;
  config.burn_in = burn_in;
  config.thin_interval = thin;
  config.n_chains = 1;
  const StudyReport report = run_study(list, config, opt);
  write_file(out / "study.csv", report.to_csv());
  write_file(out / "study.json", report.to_json());
  json cfg = sampler_json(config);
  cfg["scale"] = scale;
  cfg["replicates"] = replicates;
  cfg["desk_series"] = opt.desk_series;
  cfg["study_seed"] = seed;
  cfg["scenarios"] = scenarios;
  write_manifest(out, "study", cfg);
  std::cout << report.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependent multivariate Poisson INAR(1) toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scenario = "easy-0.5", out;
  std::uint64_t seed = 1;
  std::size_t series = 0, weeks = 0;
  bool with_exposure = false;
  auto* sim = app.add_subcommand("simulate", "Simulate a scenario panel with its ground truth");
  sim->add_option("--scenario", scenario, "easy|medium|hard-{0.1,0.5,0.9}, single or crime-like");
  sim->add_option("--seed", seed);
  sim->add_option("--out", out, "Output directory (default $POINAR_OUT_DIR)");
  sim->add_option("--series", series, "Override the number of series");
  sim->add_option("--weeks", weeks, "Override the number of weeks");
  sim->add_flag("--with-exposure", with_exposure, "Draw exposures and scale every rate by them");

  FitFlags ff;
  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler on a counts panel");
  fit->add_option("--panel", ff.panel)->required()->check(CLI::ExistingFile);
  fit->add_option("--exposure", ff.exposure)->check(CLI::ExistingFile);
  fit->add_option("--mode", ff.mode, "plain or covariate");
  fit->add_option("--iterations", ff.iterations);
  fit->add_option("--burn-in", ff.burn_in);
  fit->add_option("--thin", ff.thin);
  fit->add_option("--chains", ff.chains);
  fit->add_option("--seed", ff.seed);
  fit->add_option("--train-weeks", ff.train_weeks, "Fit on the first N weeks only");
  fit->add_option("--strategy", ff.strategy, "exact or metropolis (innovation step)");
  fit->add_option("--metropolis-threshold", ff.threshold);
  fit->add_flag("--keep-innovations", ff.keep_innovations);
  fit->add_flag("--no-scale-move", ff.no_scale_move, "Disable the joint theta/rate rescaling step");
  fit->add_option("--out", ff.out);
  fit->add_option("--eta1", ff.hyper.eta1);
  fit->add_option("--eta2", ff.hyper.eta2);
  fit->add_option("--xi1", ff.hyper.xi1);
  fit->add_option("--xi2", ff.hyper.xi2);
  auto* g1 = fit->add_option("--gamma1", ff.hyper.gamma1);
  auto* g2 = fit->add_option("--gamma2", ff.hyper.gamma2);
  fit->add_option("--a-tau", ff.hyper.a_tau);
  fit->add_option("--b-tau", ff.hyper.b_tau);

  std::string panel_path, draws_path, targets = "next", quantiles = "0.5,0.95,0.99", methods = "BNP";
  std::size_t train_weeks = 0;
  auto* fc = app.add_subcommand("forecast", "One-step forecasts with predictive quantiles");
  fc->add_option("--panel", panel_path)->required()->check(CLI::ExistingFile);
  fc->add_option("--draws", draws_path)->check(CLI::ExistingFile);
  fc->add_option("--train-weeks", train_weeks, "Weeks used for fitting (default: whole panel)");
  fc->add_option("--targets", targets, "next, first-week-of-month or all");
  fc->add_option("--quantiles", quantiles);
  fc->add_option("--methods", methods, "Comma list of BNP, CLS, SPP");
  fc->add_option("--out", out);

  std::string forecasts_path;
  int cap = 4;
  auto* ev = app.add_subcommand("evaluate", "Score forecasts against held-out counts");
  ev->add_option("--forecasts", forecasts_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--panel", panel_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--last-value-cap", cap, "Pool last values >= cap (-1 disables)");
  ev->add_option("--out", out);

  std::string scale = "desk", scenario_list;
  int replicates = 0, iterations = 1000, burn_in = 100, thin = 5;
  std::uint64_t study_seed = StudyOptions{}.seed;
  auto* st = app.add_subcommand("study", "Simulation study: BNP vs CLS vs SPP");
  st->add_option("--scale", scale, "desk or full");
  st->add_option("--replicates", replicates);
  st->add_option("--series", series, "Series per scenario at desk scale");
  st->add_option("--iterations", iterations);
  st->add_option("--burn-in", burn_in);
  st->add_option("--thin", thin);
  st->add_option("--seed", study_seed);
  st->add_option("--scenarios", scenario_list, "Comma list (default: all)");
  st->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ff.hyper_gamma_set = g1->count() > 0 || g2->count() > 0;
  try {
    if (sim->parsed()) return cmd_simulate(scenario, seed, out, series, weeks, with_exposure);
    if (fit->parsed()) return cmd_fit(ff);
    if (fc->parsed()) return cmd_forecast(panel_path, draws_path, out, train_weeks, targets, quantiles, methods);
    if (ev->parsed()) return cmd_evaluate(forecasts_path, panel_path, out, cap);
    if (st->parsed())
      return cmd_study(scale, replicates, series, iterations, burn_in, thin, study_seed, scenario_list, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
