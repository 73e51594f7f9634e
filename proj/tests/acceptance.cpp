// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of
// failures. Every tolerance and runtime budget is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "poinar/cls.hpp"
#include "poinar/diagnostics.hpp"
#include "poinar/forecast.hpp"
#include "poinar/gibbs.hpp"
#include "poinar/innovations.hpp"
#include "poinar/io.hpp"
#include "poinar/pipeline.hpp"
#include "poinar/simulate.hpp"
#include "poinar/study.hpp"

using namespace poinar;

namespace {

constexpr std::uint64_t kSeed = 2024;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. innovation pmf against the Binomial x Poisson convolution

constexpr double kPmfTol = 1e-12;
constexpr int kPmfDraws = 100000;
constexpr double kFreqSigmas = 3.0;
// one-sided normal mass beyond 3 sigma; the same level applied to the exact binomial law
constexpr double kFreqTail = 0.0013498980316301;

// Probability of a count at least as far from the mean as k, on k's side, under Binomial(n, q).
double binomial_tail(int k, int n, double q) {
  auto log_pmf = [&](int j) {
    return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(q) +
           (n - j) * std::log1p(-q);
  };
  const int step = k < n * q ? -1 : 1;
  double sum = 0.0;
  for (int j = k; j >= 0 && j <= n; j += step) {
    const double term = std::exp(log_pmf(j));
    sum += term;
    if (term < 1e-20 * sum) break;
  }
  return sum;
}

Outcome innovation_exactness() {
  double worst = 0.0;
  for (int yp = 0; yp <= 12; ++yp)
    for (int yc = 0; yc <= 12; ++yc)
      for (double a : {0.1, 0.5, 0.9})
        for (double r : {0.5, 1.0, 5.0}) {
          const auto p = innovation_pmf(yp, yc, a, r);
          std::vector<double> w;
          const int lo = std::max(0, yc - yp);
          double total = 0.0;
          for (int e = lo; e <= yc; ++e) {
            const int k = yc - e;
            const double binom = std::exp(std::lgamma(yp + 1.0) - std::lgamma(k + 1.0) - std::lgamma(yp - k + 1.0)) *
                                 std::pow(a, k) * std::pow(1.0 - a, yp - k);
            const double pois = std::exp(-r + e * std::log(r) - std::lgamma(e + 1.0));
            w.push_back(binom * pois);
            total += binom * pois;
          }
          if (p.lo != lo || p.p.size() != w.size()) return {false, "support mismatch"};
          for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(p.p[i] - w[i] / total));
        }

  // sampling: the widest conditional (12 -> 12) for every (alpha, rate)
  Rng rng(kSeed);
  int bins = 0, outside = 0, outside_normal = 0;
  for (double a : {0.1, 0.5, 0.9})
    for (double r : {0.5, 1.0, 5.0}) {
      const auto p = innovation_pmf(12, 12, a, r);
      std::vector<int> hits(p.p.size(), 0);
      for (int i = 0; i < kPmfDraws; ++i) ++hits[static_cast<std::size_t>(sample_innovation(12, 12, a, r, rng) - p.lo)];
      for (std::size_t i = 0; i < p.p.size(); ++i) {
        const double q = p.p[i];
        const double sigma = std::sqrt(q * (1.0 - q) / kPmfDraws);
        ++bins;
        if (std::abs(hits[i] / double(kPmfDraws) - q) > kFreqSigmas * sigma) ++outside_normal;
        if (binomial_tail(hits[i], kPmfDraws, q) < kFreqTail) ++outside;
      }
    }
  return {worst < kPmfTol && outside == 0,
          fmt("max |pmf - oracle| = %.2e (tol %.0e); %.0f of %.0f frequency bins outside the exact 3-sigma binomial band",
              worst, kPmfTol, outside, bins) +
              fmt(" (%.0f outside the normal-approximation band)", outside_normal)};
}

// ---------------------------------------------------------------------------
// 2. collapsed membership weights against quadrature

constexpr double kWeightRelTol = 1e-6;
constexpr int kQuadNodes = 100000;

// log ∫ λ^A e^{-λR} [Poisson(S | λE)]^{use_s} Gamma(λ | g1, g2) dλ, λ = u², Simpson in u on [0, √50].
double log_quadrature(long S, bool use_s, double E, long A, double R, double g1, double g2) {
  const double umax = std::sqrt(50.0);
  const double h = umax / kQuadNodes;
  auto log_f = [&](double u) {
    // integrand in u (lambda = u^2) is u^p times a smooth factor
    const double p = 2.0 * (static_cast<double>(A) + g1 - 1.0 + (use_s ? static_cast<double>(S) : 0.0)) + 1.0;
    const double lam = u * u;
    double v = std::log(2.0) - lam * (R + g2) + g1 * std::log(g2) - std::lgamma(g1);
    if (use_s) v += static_cast<double>(S) * std::log(E) - lam * E - std::lgamma(S + 1.0);
    if (u == 0.0) return p == 0.0 ? v : -std::numeric_limits<double>::infinity();
    return v + p * std::log(u);
  };
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kQuadNodes; ++i) shift = std::max(shift, log_f(i * h));
  double sum = 0.0;
  for (int i = 0; i <= kQuadNodes; ++i) {
    const double w = (i == 0 || i == kQuadNodes) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::exp(log_f(i * h) - shift);
  }
  return std::log(sum * h / 3.0) + shift;
}

Outcome membership_weights() {
  Rng rng(kSeed + 2);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const bool covariate = rep % 2 == 1;
    const Hyperparams h = covariate ? Hyperparams::covariate_defaults() : Hyperparams{};
    const double Theta = 5.0 + 45.0 * draw_uniform(rng);
    const double x_l = covariate ? 0.5 + 1.5 * draw_uniform(rng) : 1.0;
    const long S = static_cast<long>(rng() % 21);
    // other members of the candidate cluster
    const int members = 1 + static_cast<int>(rng() % 4);
    long A = 0;
    double rest = 0.0;
    for (int i = 0; i < members; ++i) {
      A += static_cast<long>(rng() % 21);
      rest += (covariate ? 0.5 + 1.5 * draw_uniform(rng) : 1.0) * Theta;
    }
    const double E = x_l * Theta;
    const double new_mine = log_weight_new_cluster(S, E, h.gamma1, h.gamma2);
    const double new_quad = log_quadrature(S, true, E, 0, 0.0, h.gamma1, h.gamma2);
    const double join_mine = log_weight_existing_cluster(S, A, rest, E, h.gamma1, h.gamma2);
    const double join_quad = log_quadrature(S, true, E, A, rest, h.gamma1, h.gamma2) -
                             log_quadrature(0, false, E, A, rest, h.gamma1, h.gamma2);
    worst = std::max({worst, std::abs(std::expm1(new_mine - new_quad)), std::abs(std::expm1(join_mine - join_quad))});
  }
  return {worst < kWeightRelTol, fmt("max relative error %.2e over 50 instances, half covariate (tol %.0e)", worst,
                                     kWeightRelTol)};
}

// ---------------------------------------------------------------------------
// 3. stationarity of the simulator

constexpr double kMeanRelTol = 0.02;
constexpr double kDispersionTol = 0.03;
constexpr double kAcfTol = 0.02;

Outcome stationarity() {
  const std::size_t T = 100000;
  const std::vector<double> theta(kMonths, 1.0);
  const std::vector<int> season(T, 1);
  double mean = 0.0, ratio = 0.0, acf = 0.0;
  for (int s = 0; s < 5; ++s) {
    Rng rng(derive_seed(kSeed, 3, static_cast<std::uint64_t>(s)));
    const auto y = simulate_poinar(1.0, 0.5, theta, season, T, std::nullopt, rng);
    const double m = std::accumulate(y.begin(), y.end(), 0.0) / T;
    double v = 0.0, c = 0.0;
    for (std::size_t t = 0; t < T; ++t) v += (y[t] - m) * (y[t] - m);
    for (std::size_t t = 1; t < T; ++t) c += (y[t] - m) * (y[t - 1] - m);
    v /= T - 1.0;
    mean += m / 5.0;
    ratio += v / m / 5.0;
    acf += c / (v * (T - 1.0)) / 5.0;
  }
  const bool ok = std::abs(mean - 2.0) < kMeanRelTol * 2.0 && std::abs(ratio - 1.0) < kDispersionTol &&
                  std::abs(acf - 0.5) < kAcfTol;
  return {ok, fmt("mean %.4f (target 2), var/mean %.4f (target 1), lag-1 acf %.4f (target 0.5)", mean, ratio, acf)};
}

// ---------------------------------------------------------------------------
// shared desk-scale fits for criteria 4, 5 and 9

constexpr std::size_t kDeskSeries = 40;

struct DeskFit {
  SimulatedPanel sim;
  PosteriorDraws draws;
};

DeskFit desk_fit(const std::string& scenario, int replicate, int chains) {
  const Scenario sc = find_scenario(scenario);
  Rng rng(derive_seed(kSeed, sc.seed, static_cast<std::uint64_t>(replicate), 0));
  DeskFit f{simulate_panel(sc.panel_spec(kDeskSeries, rng), rng), {}};
  SamplerConfig c;
  c.n_iterations = 1000;
  c.burn_in = 100;
  c.thin_interval = 5;
  c.n_chains = chains;
  c.seed = derive_seed(kSeed, sc.seed, static_cast<std::uint64_t>(replicate), 1);
  f.draws = run_chains(f.sim.panel, c);
  return f;
}

double mean_hamming(const DeskFit& f) {
  double h = 0.0;
  for (const Draw& d : f.draws.draws) h += hamming_error(d.z, f.sim.truth.z);
  return h / static_cast<double>(f.draws.draws.size());
}

// 4. cluster recovery on the easy design

constexpr double kHammingTol = 0.10;
constexpr int kRecoverySeeds = 5;
constexpr int kRecoveryNeeded = 4;

Outcome cluster_recovery() {
  int good = 0;
  std::ostringstream os;
  os << "per seed (modal K, mean Hamming):";
  for (int s = 0; s < kRecoverySeeds; ++s) {
    const DeskFit f = desk_fit("easy-0.5", s, 1);
    const int k = cluster_count_histogram(f.draws).mode;
    const double h = mean_hamming(f);
    good += (k == 4 && h < kHammingTol);
    os << " (" << k << ", " << fmt("%.3f", h) << ")";
  }
  os << "; " << good << " of 5 meet K = 4 and Hamming < 0.10, need " << kRecoveryNeeded;
  return {good >= kRecoveryNeeded, os.str()};
}

// 5. single-cluster sanity

Outcome single_cluster() {
  int good = 0;
  std::ostringstream os;
  os << "modal K per seed:";
  for (int s = 0; s < kRecoverySeeds; ++s) {
    const DeskFit f = desk_fit("single", s, 1);
    const int k = cluster_count_histogram(f.draws).mode;
    good += k == 1;
    os << " " << k;
  }
  os << "; " << good << " of 5 equal 1, need " << kRecoveryNeeded;
  return {good >= kRecoveryNeeded, os.str()};
}

// ---------------------------------------------------------------------------
// 6. method ordering over the nine-scenario grid

constexpr int kOrderingNeeded = 7;

Outcome method_ordering() {
  std::vector<Scenario> grid = benchmark_scenarios();
  grid.erase(std::remove_if(grid.begin(), grid.end(), [](const Scenario& s) { return s.name == "single"; }), grid.end());
  SamplerConfig c;
  c.n_iterations = 1000;
  c.burn_in = 100;
  c.thin_interval = 5;
  StudyOptions o;
  o.scale = StudyScale::desk;
  o.desk_series = kDeskSeries;
  o.replicates = 3;
  o.seed = kSeed;
  const StudyReport report = run_study(grid, c, o);
  int good = 0;
  std::ostringstream os;
  for (const ScenarioResult& r : report.results) {
    const double b = r.score("BNP").rmse, cl = r.score("CLS").rmse, sp = r.score("SPP").rmse;
    const bool ok = b <= cl && b <= sp;
    good += ok;
    os << r.scenario << fmt(" %.3f/%.3f/%.3f", b, cl, sp) << (ok ? "" : "(x)") << "; ";
  }
  os << "BNP best in " << good << " of " << report.results.size() << ", need " << kOrderingNeeded
     << " [RMSE BNP/CLS/SPP]";
  return {good >= kOrderingNeeded, os.str()};
}

// ---------------------------------------------------------------------------
// 7. CLS validity

constexpr double kThetaSumTol = 1e-10;
constexpr double kGridSlack = 1e-6;

// SSE minimized over theta >= 0, sum theta = 1 for fixed (alpha, lambda):
// theta_m = max(0, rbar_m / lambda - nu / (lambda^2 n_m)), nu by bisection.
double profiled_sse(const std::vector<int>& y, const std::vector<int>& season, double alpha, double lambda) {
  std::vector<double> sum(kMonths, 0.0);
  std::vector<int> n(kMonths, 0);
  for (std::size_t t = 1; t < y.size(); ++t) {
    const auto m = static_cast<std::size_t>(season[t] - 1);
    sum[m] += y[t] - alpha * y[t - 1];
    ++n[m];
  }
  auto theta_at = [&](double nu) {
    std::vector<double> th(kMonths, 0.0);
    for (int m = 0; m < kMonths; ++m)
      if (n[static_cast<std::size_t>(m)] > 0)
        th[static_cast<std::size_t>(m)] = std::max(0.0, sum[static_cast<std::size_t>(m)] / (n[static_cast<std::size_t>(m)] * lambda) -
                                                            nu / (lambda * lambda * n[static_cast<std::size_t>(m)]));
    return th;
  };
  auto total = [&](double nu) {
    const auto th = theta_at(nu);
    return std::accumulate(th.begin(), th.end(), 0.0);
  };
  double lo = -1e12, hi = 1e12;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) > 1.0 ? lo : hi) = mid;
  }
  return cls_sse(y, season, alpha, lambda, theta_at(0.5 * (lo + hi)));
}

Outcome cls_validity() {
  Rng rng(kSeed + 7);
  double worst_sum = 0.0, worst_gap = -std::numeric_limits<double>::infinity();
  int nonmonotone = 0, unconverged = 0, max_iter = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double lambda = 0.5 + 9.5 * draw_uniform(rng);
    const double alpha = 0.05 + 0.85 * draw_uniform(rng);
    std::vector<double> theta(kMonths);
    for (double& t : theta) t = draw_gamma(rng, 8.0, 8.0);
    const auto cal = weekly_calendar(default_origin(), 208);
    const auto y = simulate_poinar(lambda, alpha, theta, cal.season_of, 208, std::nullopt, rng);
    ClsOptions opt;
    opt.record_trace = true;
    const ClsEstimate est = cls_fit(y, cal.season_of, std::nullopt, opt);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(est.theta.begin(), est.theta.end(), 0.0) - 1.0));
    for (std::size_t i = 1; i < est.sse_trace.size(); ++i)
      if (est.sse_trace[i] > est.sse_trace[i - 1] * (1.0 + 1e-12)) ++nonmonotone;
    unconverged += !est.converged;
    max_iter = std::max(max_iter, est.iterations);

    // 90 x 90 grid over (alpha, lambda) around the truth, theta profiled
    double grid_best = std::numeric_limits<double>::infinity();
    const double lam_hi = 2.5 * lambda * std::accumulate(theta.begin(), theta.end(), 0.0);
    for (int i = 0; i < 90; ++i)
      for (int j = 1; j <= 90; ++j)
        grid_best = std::min(grid_best, profiled_sse(y, cal.season_of, 0.99 * i / 89.0, lam_hi * j / 90.0));
    worst_gap = std::max(worst_gap, est.sse - grid_best);
  }
  const bool ok = worst_sum < kThetaSumTol && nonmonotone == 0 && worst_gap <= kGridSlack && unconverged == 0 &&
                  max_iter <= 100;
  std::ostringstream os;
  os << fmt("max |sum theta - 1| = %.1e; SSE increases %.0f; max (fit - grid oracle) SSE = %.3g; ", worst_sum,
            nonmonotone, worst_gap)
     << "unconverged " << unconverged << ", most cycles " << max_iter << " over 20 series";
  return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 8. forecast identities

constexpr double kMeanTol = 1e-10;

Outcome forecast_identities() {
  double worst_mean = 0.0, worst_field = 0.0, min_mass = 1.0;
  int nonmonotone = 0, recursion_breaks = 0, cases = 0;
  std::vector<double> theta(kMonths);
  for (int m = 0; m < kMonths; ++m) theta[static_cast<std::size_t>(m)] = 0.6 + 0.07 * m;
  const std::vector<int> seasons{11, 12, 1, 2, 3, 4};
  for (int y : {0, 1, 3, 8, 20})
    for (double a : {0.0, 0.25, 0.5, 0.9})
      for (double mu : {0.1, 1.0, 2.5, 7.0, 15.0}) {
        ++cases;
        const double exact = a * y + mu;
        // support wide enough that the truncated tail is far below double precision
        const auto wide = predictive_pmf(y, a, mu, 1.0, y + static_cast<int>(mu + 40.0 * std::sqrt(mu + 1.0)) + 40);
        double m = 0.0;
        for (int k = 0; k <= wide.y_max(); ++k) m += k * wide.pmf[static_cast<std::size_t>(k)];
        worst_mean = std::max(worst_mean, std::abs(m - exact));
        const auto d = predictive_pmf(y, a, mu, 1.0);
        worst_field = std::max(worst_field, std::abs(d.mean - exact));
        min_mass = std::min(min_mass, d.mass());
        int prev = 0;
        for (double u = 0.005; u < 1.0; u += 0.005) {
          const int q = quantile(d, u);
          nonmonotone += q < prev;
          prev = q;
        }
        double rec = y;
        for (int h = 1; h <= 6; ++h) {
          rec = a * rec + mu * theta[static_cast<std::size_t>(seasons[static_cast<std::size_t>(h - 1)] - 1)];
          recursion_breaks += conditional_mean_h_step(y, a, mu, theta, seasons, h) != rec;
        }
      }
  const bool ok = worst_mean < kMeanTol && worst_field < kMeanTol && min_mass >= 1.0 - kTailBudget &&
                  nonmonotone == 0 && recursion_breaks == 0;
  return {ok, fmt("%.0f cases: max |pmf mean - (a y + l th)| = %.1e, min mass 1 - %.1e, ", cases, worst_mean,
                  1.0 - min_mass) +
                  fmt("quantile inversions %.0f, h-step recursion mismatches %.0f", nonmonotone, recursion_breaks)};
}

// ---------------------------------------------------------------------------
// 9. convergence diagnostic

constexpr double kPsrfTol = 1.1;

Outcome convergence() {
  const DeskFit f = desk_fit("easy-0.5", 0, 3);
  std::vector<std::vector<double>> sums(3);
  for (const Draw& d : f.draws.draws) sums[static_cast<std::size_t>(d.chain)].push_back(f.draws.lambda_sum(d));
  const double r = psrf(sums);
  return {r < kPsrfTol, fmt("PSRF of the summed rates over 3 chains = %.4f (tol %.1f)", r, kPsrfTol)};
}

// ---------------------------------------------------------------------------
// 10. Hamming against exhaustive relabeling

Outcome hamming_oracle() {
  Rng rng(kSeed + 10);
  int mismatches = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t L = 5 + rng() % 60;
    const int ke = 1 + static_cast<int>(rng() % 5), kt = 1 + static_cast<int>(rng() % 5);
    std::vector<int> est(L), tru(L);
    for (auto& v : est) v = static_cast<int>(rng() % static_cast<unsigned>(ke));
    for (auto& v : tru) v = static_cast<int>(rng() % static_cast<unsigned>(kt));
    const int big = std::max(*std::max_element(est.begin(), est.end()), *std::max_element(tru.begin(), tru.end())) + 1;
    std::vector<int> perm(static_cast<std::size_t>(big));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < L; ++i) hits += perm[static_cast<std::size_t>(est[i])] == tru[i];
      best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const std::size_t mine = static_cast<std::size_t>(std::llround((1.0 - hamming_error(est, tru)) * static_cast<double>(L)));
    mismatches += mine != best;
  }
  return {mismatches == 0, fmt("%.0f of 200 instances differ from the exhaustive optimum", mismatches)};
}

// ---------------------------------------------------------------------------
// 11. reproducibility and persistence

Outcome reproducibility() {
  const Scenario sc = find_scenario("medium-0.5");
  Rng rng(kSeed + 11);
  const SimulatedPanel sim = simulate_panel(sc.panel_spec(20, rng), rng);
  SamplerConfig c;
  c.n_iterations = 200;
  c.burn_in = 50;
  c.thin_interval = 5;
  c.n_chains = 2;
  c.seed = kSeed;
  c.keep_innovations = true;
  const std::string a = format_draws(run_chains(sim.panel, c));
  const std::string b = format_draws(run_chains(sim.panel, c));
  const PosteriorDraws back = parse_draws(a);
  const bool round_trip = format_draws(back) == a;
  Rng again(kSeed + 11);
  const bool panel_same = format_counts(simulate_panel(sc.panel_spec(20, again), again).panel) == format_counts(sim.panel) &&
                          format_counts(parse_counts(format_counts(sim.panel))) == format_counts(sim.panel);
  return {a == b && round_trip && panel_same,
          std::string("draws byte-identical: ") + (a == b ? "yes" : "no") + ", draws round trip: " +
              (round_trip ? "yes" : "no") + ", panel regenerate + round trip: " + (panel_same ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 12. evaluation report on a city-sized simulated panel

Outcome city_report() {
  Rng rng(kSeed + 12);
  const SimulatedPanel sim = simulate_panel(crime_like_spec(188, 418, false, rng), rng);
  const std::size_t train = 365;  // 2001-01-01 .. 2007-12-30; forecasts cover 2008
  SamplerConfig c;
  c.n_iterations = 300;
  c.burn_in = 100;
  c.thin_interval = 5;
  c.n_chains = 2;
  c.seed = kSeed;
  const PosteriorDraws draws = run_chains(sim.panel.head(train), c);
  ForecastRequest req;
  req.train_weeks = train;
  req.targets = TargetRule::first_week_of_month;
  req.methods = {"BNP", "CLS", "SPP"};
  const auto rows = parse_forecasts(format_forecasts(make_forecasts(sim.panel, &draws, req), req.quantiles));
  const auto reports = evaluate_forecasts(rows, sim.panel, 4);
  bool ok = reports.size() == 3;
  std::ostringstream os;
  for (const auto& [method, r] : reports) {
    double freq = 0.0;
    bool finite = std::isfinite(r.rmse_se) && std::isfinite(r.bias_se);
    for (const auto& [k, g] : r.by_last_value) {
      freq += g.frequency;
      finite = finite && std::isfinite(g.rmse_se) && std::isfinite(g.bias_se) && std::isfinite(g.rmse);
    }
    ok = ok && std::abs(freq - 1.0) < 1e-12 && finite && r.by_last_value.size() == 5;
    os << method << fmt(" n=%.0f rmse %.3f (se %.3f) groups ", static_cast<double>(r.n), r.rmse, r.rmse_se)
       << r.by_last_value.size() << fmt(" freq sum %.12f; ", freq);
  }
  return {ok, os.str() + (ok ? "all standard errors finite" : "report incomplete")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // optional arguments restrict the run to the listed criterion ids
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "innovation pmf exactness", 10, innovation_exactness},
      {2, "collapsed membership weights", 30, membership_weights},
      {3, "simulator stationarity", 5, stationarity},
      {4, "cluster recovery, easy design", 300, cluster_recovery},
      {5, "single-cluster sanity", 180, single_cluster},
      {6, "method ordering", 1800, method_ordering},
      {7, "CLS validity", 600, cls_validity},
      {8, "forecast identities", 60, forecast_identities},
      {9, "convergence diagnostic", 600, convergence},
      {10, "Hamming oracle", 60, hamming_oracle},
      {11, "reproducibility", 300, reproducibility},
      {12, "city-sized evaluation report", 1200, city_report},
  };
  int failures = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %2d %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
