#include "poinar/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>

#include "poinar/simulate.hpp"

namespace poinar {

std::vector<double> series_weights(const CountPanel& panel, RateMode mode) {
  if (mode == RateMode::covariate) {
    if (!panel.exposure) throw ConfigError("covariate mode requires an exposure vector");
    return *panel.exposure;
  }
  return std::vector<double>(panel.num_series(), 1.0);
}

SuffStats SuffStats::compute(const CountPanel& panel, const ModelState& state, RateMode mode) {
  const std::size_t L = panel.num_series();
  const std::size_t T = panel.num_weeks();
  const std::size_t K = state.num_clusters();
  SuffStats s;
  s.weight = series_weights(panel, mode);
  s.S.assign(L, 0);
  s.R.assign(T, 0);
  s.B.assign(K, 0);
  s.n.assign(K, 0);
  s.cluster_weight.assign(K, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const int* eps = state.innovations.row(l);
    for (std::size_t t = 0; t < T; ++t) {
      s.S[l] += eps[t];
      s.R[t] += eps[t];
    }
    const auto k = static_cast<std::size_t>(state.z[l]);
    s.B[k] += s.S[l];
    s.n[k] += 1;
    s.cluster_weight[k] += s.weight[l];
  }
  s.Theta = SeasonSummary::from(panel.season_of).theta_total(state.theta);
  return s;
}

namespace {

double log_negbin_marginal(long S, double shape, double prior_rate, double exposure) {
  const double Sd = static_cast<double>(S);
  return std::lgamma(Sd + shape) - std::lgamma(shape) - log_factorial(static_cast<int>(S)) +
         shape * (std::log(prior_rate) - std::log(prior_rate + exposure)) +
         Sd * (std::log(exposure) - std::log(prior_rate + exposure));
}

std::size_t sample_log_categorical(const std::vector<double>& logw, Rng& rng) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    w[i] = std::exp(logw[i] - mx);
    total += w[i];
  }
  double u = draw_uniform(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return i;
  }
  return w.size() - 1;
}

// Removes cluster k by moving the last cluster into its slot.
void drop_cluster(std::size_t k, ModelState& state, SuffStats& stats) {
  const std::size_t last = state.phi_star.size() - 1;
  if (k != last) {
    state.phi_star[k] = state.phi_star[last];
    stats.B[k] = stats.B[last];
    stats.n[k] = stats.n[last];
    stats.cluster_weight[k] = stats.cluster_weight[last];
    for (int& zl : state.z)
      if (zl == static_cast<int>(last)) zl = static_cast<int>(k);
  }
  state.phi_star.pop_back();
  stats.B.pop_back();
  stats.n.pop_back();
  stats.cluster_weight.pop_back();
}

// Joint rescaling theta -> c theta, phi* -> phi* / c. The likelihood only sees
// products lambda_l theta_m, so only the priors and the Jacobian enter the
// acceptance ratio.
void sample_scale(ModelState& state, const Hyperparams& hyper, Rng& rng) {
  const double K = static_cast<double>(state.num_clusters());
  const double sum_theta = std::accumulate(state.theta.begin(), state.theta.end(), 0.0);
  const double sum_phi = std::accumulate(state.phi_star.begin(), state.phi_star.end(), 0.0);
  const double power = kMonths * hyper.xi1 - K * hyper.gamma1;
  auto log_target = [&](double log_c) {
    const double c = std::exp(log_c);
    return power * log_c - hyper.xi2 * sum_theta * c - hyper.gamma2 * sum_phi / c;
  };
  std::normal_distribution<double> step(0.0, 0.3);
  double log_c = 0.0;
  double current = log_target(0.0);
  for (int i = 0; i < 5; ++i) {
    const double proposal = log_c + step(rng);
    const double next = log_target(proposal);
    if (std::log(draw_uniform(rng)) < next - current) {
      log_c = proposal;
      current = next;
    }
  }
  const double c = std::exp(log_c);
  for (double& th : state.theta) th *= c;
  for (double& phi : state.phi_star) phi /= c;
}

}  // namespace

double log_weight_new_cluster(long S, double exposure, double gamma1, double gamma2) {
  return log_negbin_marginal(S, gamma1, gamma2, exposure);
}

double log_weight_existing_cluster(long S, long A, double rest_exposure, double exposure,
                                   double gamma1, double gamma2) {
  return log_negbin_marginal(S, static_cast<double>(A) + gamma1, rest_exposure + gamma2, exposure);
}

GammaParams unique_rate_posterior(long B_k, double cluster_weight, double Theta, const Hyperparams& hyper) {
  return {static_cast<double>(B_k) + hyper.gamma1, cluster_weight * Theta + hyper.gamma2};
}

GammaParams seasonal_posterior(long innovations_in_month, int q_m, double rate_total, const Hyperparams& hyper) {
  if (q_m == 0) return {hyper.xi1, hyper.xi2};
  return {static_cast<double>(innovations_in_month) + hyper.xi1, q_m * rate_total + hyper.xi2};
}

BetaParams thinning_posterior(const int* y, const int* eps, std::size_t T, const Hyperparams& hyper) {
  long survivors = 0;
  long deaths = 0;
  for (std::size_t t = 1; t < T; ++t) {
    survivors += y[t] - eps[t];
    deaths += y[t - 1] - (y[t] - eps[t]);
  }
  return {static_cast<double>(survivors) + hyper.eta1, static_cast<double>(deaths) + hyper.eta2};
}

double concentration_mixture_weight(double a_tau, double b_tau, std::size_t K, std::size_t L, double kappa) {
  const double odds = (a_tau + static_cast<double>(K) - 1.0) /
                      (static_cast<double>(L) * (b_tau - std::log(kappa)));
  return odds / (1.0 + odds);
}

void sample_memberships(ModelState& state, SuffStats& stats, const Hyperparams& hyper, Rng& rng,
                        const std::vector<std::size_t>* visit_order) {
  const std::size_t L = state.z.size();
  std::vector<std::size_t> order(L);
  if (visit_order) {
    if (visit_order->size() != L) throw std::invalid_argument("visit order length differs from series count");
    order = *visit_order;
  } else {
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  std::vector<double> logw;
  for (std::size_t l : order) {
    const long S = stats.S[l];
    const double w = stats.weight[l];
    const double exposure = w * stats.Theta;

    auto k_old = static_cast<std::size_t>(state.z[l]);
    stats.B[k_old] -= S;
    stats.n[k_old] -= 1;
    stats.cluster_weight[k_old] -= w;
    if (stats.n[k_old] == 0) drop_cluster(k_old, state, stats);

    const std::size_t K = state.num_clusters();
    logw.resize(K + 1);
    for (std::size_t j = 0; j < K; ++j) {
      logw[j] = std::log(static_cast<double>(stats.n[j])) +
                log_weight_existing_cluster(S, stats.B[j], stats.cluster_weight[j] * stats.Theta, exposure,
                                            hyper.gamma1, hyper.gamma2);
    }
    logw[K] = std::log(state.tau) + log_weight_new_cluster(S, exposure, hyper.gamma1, hyper.gamma2);

    const std::size_t k_new = sample_log_categorical(logw, rng);
    if (k_new == K) {
      const GammaParams post = unique_rate_posterior(S, w, stats.Theta, hyper);
      state.phi_star.push_back(draw_gamma(rng, post.shape, post.rate));
      stats.B.push_back(0);
      stats.n.push_back(0);
      stats.cluster_weight.push_back(0.0);
    }
    state.z[l] = static_cast<int>(k_new);
    stats.B[k_new] += S;
    stats.n[k_new] += 1;
    stats.cluster_weight[k_new] += w;
  }

  // Canonical labels; permute the per-cluster statistics alongside.
  const std::vector<int> z_before = state.z;
  const std::vector<long> B = stats.B;
  const std::vector<int> n = stats.n;
  const std::vector<double> cw = stats.cluster_weight;
  canonicalize_labels(state);
  for (std::size_t l = 0; l < L; ++l) {
    const auto from = static_cast<std::size_t>(z_before[l]);
    const auto to = static_cast<std::size_t>(state.z[l]);
    stats.B[to] = B[from];
    stats.n[to] = n[from];
    stats.cluster_weight[to] = cw[from];
  }
}

void canonicalize_labels(ModelState& state) {
  const std::size_t K = state.num_clusters();
  std::vector<int> relabel(K, -1);
  int next = 0;
  for (int& zl : state.z) {
    auto& target = relabel[static_cast<std::size_t>(zl)];
    if (target < 0) target = next++;
    zl = target;
  }
  std::vector<double> phi(static_cast<std::size_t>(next));
  for (std::size_t k = 0; k < K; ++k)
    if (relabel[k] >= 0) phi[static_cast<std::size_t>(relabel[k])] = state.phi_star[k];
  state.phi_star = std::move(phi);
}

void sample_unique_rates(ModelState& state, const SuffStats& stats, const Hyperparams& hyper, Rng& rng) {
  for (std::size_t k = 0; k < state.num_clusters(); ++k) {
    if (stats.n[k] < 1) throw std::logic_error("empty cluster while sampling unique rates");
    const GammaParams post = unique_rate_posterior(stats.B[k], stats.cluster_weight[k], stats.Theta, hyper);
    state.phi_star[k] = draw_gamma(rng, post.shape, post.rate);
  }
}

void sample_seasonals(ModelState& state, const CountPanel& panel, const SuffStats& stats,
                      const Hyperparams& hyper, Rng& rng) {
  std::vector<long> month_total(kMonths, 0);
  std::vector<int> q(kMonths, 0);
  for (std::size_t t = 0; t < panel.num_weeks(); ++t) {
    const auto m = static_cast<std::size_t>(panel.season_of[t] - 1);
    month_total[m] += stats.R[t];
    ++q[m];
  }
  double rate_total = 0.0;
  for (std::size_t l = 0; l < state.z.size(); ++l)
    rate_total += stats.weight[l] * state.phi_star[static_cast<std::size_t>(state.z[l])];
  for (std::size_t m = 0; m < static_cast<std::size_t>(kMonths); ++m) {
    const GammaParams post = seasonal_posterior(month_total[m], q[m], rate_total, hyper);
    state.theta[m] = draw_gamma(rng, post.shape, post.rate);
  }
}

void sample_thinnings(ModelState& state, const CountPanel& panel, const Hyperparams& hyper, Rng& rng) {
  const std::size_t T = panel.num_weeks();
  for (std::size_t l = 0; l < panel.num_series(); ++l) {
    const BetaParams post = thinning_posterior(panel.counts.row(l), state.innovations.row(l), T, hyper);
    state.alpha[l] = draw_beta(rng, post.a, post.b);
  }
}

void sample_concentration(ModelState& state, const Hyperparams& hyper, Rng& rng) {
  const std::size_t K = state.num_clusters();
  const std::size_t L = state.z.size();
  if (K < 1) throw std::logic_error("concentration update needs at least one cluster");
  const double kappa = draw_beta(rng, state.tau + 1.0, static_cast<double>(L));
  const double pi = concentration_mixture_weight(hyper.a_tau, hyper.b_tau, K, L, kappa);
  const double rate = hyper.b_tau - std::log(kappa);
  const double shape = hyper.a_tau + static_cast<double>(K) - (draw_uniform(rng) < pi ? 0.0 : 1.0);
  state.tau = draw_gamma(rng, shape, rate);
}

void check_state(const CountPanel& panel, const ModelState& state) {
  const std::size_t L = panel.num_series();
  const std::size_t T = panel.num_weeks();
  const std::size_t K = state.num_clusters();
  if (state.z.size() != L || state.alpha.size() != L) throw std::logic_error("state length differs from panel");
  std::vector<int> n(K, 0);
  for (int zl : state.z) {
    if (zl < 0 || static_cast<std::size_t>(zl) >= K) throw std::logic_error("membership references a missing cluster");
    ++n[static_cast<std::size_t>(zl)];
  }
  for (int nk : n)
    if (nk == 0) throw std::logic_error("empty cluster after compaction");
  for (std::size_t l = 0; l < L; ++l) {
    if (state.innovations(l, 0) != panel.counts(l, 0)) throw std::logic_error("first innovation differs from first count");
    for (std::size_t t = 1; t < T; ++t) {
      const int y = panel.counts(l, t);
      const int e = state.innovations(l, t);
      if (e < std::max(0, y - panel.counts(l, t - 1)) || e > y)
        throw std::logic_error("innovation outside its support at series " + std::to_string(l) + ", week " +
                               std::to_string(t));
    }
  }
}

void SamplerConfig::validate() const {
  if (n_iterations < 1 || thin_interval < 1 || n_chains < 1 || burn_in < 0)
    throw ConfigError("iterations, thinning interval and chain count must be positive");
  if (burn_in >= n_iterations) throw ConfigError("burn-in must be smaller than the number of iterations");
  if (metropolis_threshold < 0) throw ConfigError("metropolis threshold must be nonnegative");
  hyper.validate();
}

int SamplerConfig::draws_per_chain() const { return (n_iterations - burn_in) / thin_interval; }

double PosteriorDraws::lambda(const Draw& d, std::size_t l) const {
  double v = d.phi_star[static_cast<std::size_t>(d.z[l])];
  if (mode == RateMode::covariate) v *= (*exposure)[l];
  return v;
}

double PosteriorDraws::lambda_sum(const Draw& d) const {
  double s = 0.0;
  for (std::size_t l = 0; l < d.z.size(); ++l) s += lambda(d, l);
  return s;
}

std::vector<const Draw*> PosteriorDraws::chain(int index) const {
  std::vector<const Draw*> out;
  for (const Draw& d : draws)
    if (d.chain == index) out.push_back(&d);
  return out;
}

int PosteriorDraws::num_chains() const {
  int mx = -1;
  for (const Draw& d : draws) mx = std::max(mx, d.chain);
  return mx + 1;
}

ModelState initial_state(const CountPanel& panel, const SamplerConfig& config, Rng& rng) {
  const std::size_t L = panel.num_series();
  const InitDistributions& init = config.init;
  ModelState s;
  s.theta.resize(kMonths);
  for (double& th : s.theta) th = draw_gamma(rng, init.theta.shape, init.theta.rate);
  s.alpha.resize(L);
  for (double& a : s.alpha) a = draw_beta(rng, init.alpha.a, init.alpha.b);
  s.tau = draw_gamma(rng, init.tau.shape, init.tau.rate);
  s.z = crp_draw(L, s.tau, rng);
  const int K = *std::max_element(s.z.begin(), s.z.end()) + 1;
  s.phi_star.resize(static_cast<std::size_t>(K));
  for (double& phi : s.phi_star) phi = draw_gamma(rng, init.phi.shape, init.phi.rate);
  // Any in-support value works as a Metropolis starting point.
  s.innovations = panel.counts;
  return s;
}

void gibbs_sweep(const CountPanel& panel, const SamplerConfig& config, std::uint64_t chain_seed,
                 std::uint64_t sweep, ModelState& state, Rng& rng) {
  const Hyperparams& hyper = config.hyper;
  const std::vector<double>* exposure =
      hyper.mode == RateMode::covariate ? &panel.exposure.value() : nullptr;

  // Innovations.
  const std::vector<double> rates = state.series_rates(exposure);
  InnovationSweep in;
  in.alpha = &state.alpha;
  in.rates = &rates;
  in.theta = &state.theta;
  in.strategy = config.innovation_strategy;
  in.metropolis_threshold = config.metropolis_threshold;
  in.chain_seed = chain_seed;
  in.sweep = sweep;
  if (config.parallel_innovations)
    sample_innovations_parallel(panel, in, state.innovations);
  else
    sample_innovations_serial(panel, in, state.innovations);

  SuffStats stats = SuffStats::compute(panel, state, hyper.mode);
  sample_memberships(state, stats, hyper, rng);
  sample_unique_rates(state, stats, hyper, rng);
  sample_seasonals(state, panel, stats, hyper, rng);
  sample_thinnings(state, panel, hyper, rng);
  sample_concentration(state, hyper, rng);
  if (config.scale_move) sample_scale(state, hyper, rng);

  if (config.check_invariants) check_state(panel, state);
}

namespace {

void validate_run(const CountPanel& panel, const SamplerConfig& config) {
  config.validate();
  panel.validate();
  if (config.hyper.mode == RateMode::covariate && !panel.exposure)
    throw ConfigError("covariate mode requires an exposure vector");
}

PosteriorDraws run_chain_unchecked(const CountPanel& panel, const SamplerConfig& config, int chain_index) {
  const std::uint64_t chain_seed = derive_seed(config.seed, static_cast<std::uint64_t>(chain_index));
  Rng rng(chain_seed);
  ModelState state = initial_state(panel, config, rng);

  PosteriorDraws out;
  out.mode = config.hyper.mode;
  out.num_series = panel.num_series();
  if (config.hyper.mode == RateMode::covariate) out.exposure = panel.exposure;
  out.draws.reserve(static_cast<std::size_t>(config.draws_per_chain()));
  ChainTrace trace;
  trace.chain = chain_index;
  trace.num_clusters.reserve(static_cast<std::size_t>(config.n_iterations));
  trace.lambda_sum.reserve(static_cast<std::size_t>(config.n_iterations));

  const std::vector<double>* exposure = out.exposure ? &*out.exposure : nullptr;
  for (int it = 1; it <= config.n_iterations; ++it) {
    gibbs_sweep(panel, config, chain_seed, static_cast<std::uint64_t>(it), state, rng);

    const std::vector<double> rates = state.series_rates(exposure);
    trace.num_clusters.push_back(static_cast<int>(state.num_clusters()));
    trace.lambda_sum.push_back(std::accumulate(rates.begin(), rates.end(), 0.0));

    if (it > config.burn_in && (it - config.burn_in) % config.thin_interval == 0) {
      Draw d;
      d.chain = chain_index;
      d.iteration = it;
      d.alpha = state.alpha;
      d.z = state.z;
      d.phi_star = state.phi_star;
      d.theta = state.theta;
      d.tau = state.tau;
      if (config.keep_innovations) d.innovations = state.innovations;
      out.draws.push_back(std::move(d));
    }
  }
  out.traces.push_back(std::move(trace));
  return out;
}

}  // namespace

PosteriorDraws run_chain(const CountPanel& panel, const SamplerConfig& config, int chain_index) {
  validate_run(panel, config);
  return run_chain_unchecked(panel, config, chain_index);
}

PosteriorDraws run_chains(const CountPanel& panel, const SamplerConfig& config) {
  validate_run(panel, config);
  std::vector<PosteriorDraws> per_chain(static_cast<std::size_t>(config.n_chains));
  std::vector<std::exception_ptr> errors(per_chain.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < config.n_chains; ++c) {
    try {
      per_chain[static_cast<std::size_t>(c)] = run_chain_unchecked(panel, config, c);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorDraws out;
  out.mode = config.hyper.mode;
  out.num_series = panel.num_series();
  if (config.hyper.mode == RateMode::covariate) out.exposure = panel.exposure;
  for (auto& chain : per_chain) {
    for (auto& d : chain.draws) out.draws.push_back(std::move(d));
    for (auto& t : chain.traces) out.traces.push_back(std::move(t));
  }
  return out;
}

}  // namespace poinar
