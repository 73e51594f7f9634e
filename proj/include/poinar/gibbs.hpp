#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "poinar/innovations.hpp"
#include "poinar/random.hpp"
#include "poinar/types.hpp"

namespace poinar {

/// Sufficient statistics of the current innovations and memberships.
///
/// `weight[l]` is the exposure multiplier of series l (X_l in covariate mode,
/// 1 otherwise); `cluster_weight[k]` sums it over cluster k. In plain mode it
/// equals the cluster size.
struct SuffStats {
  std::vector<long> S;               // per series, sum over all T weeks
  std::vector<long> B;               // per cluster
  std::vector<int> n;                // per cluster
  std::vector<double> weight;        // per series
  std::vector<double> cluster_weight;  // per cluster
  std::vector<long> R;               // per week, sum over series
  double Theta = 0.0;

  static SuffStats compute(const CountPanel& panel, const ModelState& state, RateMode mode);
};

/// Per-series exposure multipliers: X_l in covariate mode, all ones otherwise.
std::vector<double> series_weights(const CountPanel& panel, RateMode mode);

// ---------------------------------------------------------------------------
// Collapsed membership weights.
//
// Both are negative-binomial marginals of S ~ Poisson(rate * exposure) with
// rate ~ Gamma(shape, prior_rate), integrated over the rate:
//   Gamma(S + shape) / (Gamma(shape) S!) * (r / (r + E))^shape * (E / (r + E))^S.

/// log p_{l,0}: a fresh cluster, rate ~ Gamma(gamma1, gamma2). `exposure`
/// is Theta in plain mode and X_l * Theta in covariate mode.
double log_weight_new_cluster(long S, double exposure, double gamma1, double gamma2);

/// log p_{l,j}: joining cluster j whose other members carry innovation total
/// `A` and exposure total `rest_exposure` (sum of w_i * Theta over i != l).
double log_weight_existing_cluster(long S, long A, double rest_exposure, double exposure,
                                   double gamma1, double gamma2);

// ---------------------------------------------------------------------------
// Conjugate posteriors, exposed so tests can recount them independently.

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};
struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

GammaParams unique_rate_posterior(long B_k, double cluster_weight, double Theta, const Hyperparams& hyper);
GammaParams seasonal_posterior(long innovations_in_month, int q_m, double rate_total, const Hyperparams& hyper);
/// Thinning posterior from one series' counts and innovations, summing t >= 2.
BetaParams thinning_posterior(const int* y, const int* eps, std::size_t T, const Hyperparams& hyper);

/// Weight pi of the Gamma(a+K, b-log kappa) component in the concentration update.
double concentration_mixture_weight(double a_tau, double b_tau, std::size_t K, std::size_t L, double kappa);

// ---------------------------------------------------------------------------
// Sampler steps. Each updates `state` in place.

void sample_memberships(ModelState& state, SuffStats& stats, const Hyperparams& hyper, Rng& rng,
                        const std::vector<std::size_t>* visit_order = nullptr);
void sample_unique_rates(ModelState& state, const SuffStats& stats, const Hyperparams& hyper, Rng& rng);
void sample_seasonals(ModelState& state, const CountPanel& panel, const SuffStats& stats,
                      const Hyperparams& hyper, Rng& rng);
void sample_thinnings(ModelState& state, const CountPanel& panel, const Hyperparams& hyper, Rng& rng);
void sample_concentration(ModelState& state, const Hyperparams& hyper, Rng& rng);

/// Relabels clusters by first appearance in z (phi_star permuted to match).
void canonicalize_labels(ModelState& state);

/// Throws std::logic_error if support bounds or cluster invariants fail.
void check_state(const CountPanel& panel, const ModelState& state);

// ---------------------------------------------------------------------------

/// Distributions used to draw each chain's starting point.
struct InitDistributions {
  GammaParams theta{1.0, 1.0};
  BetaParams alpha{1.0, 1.0};
  GammaParams tau{2.0, 4.0};
  GammaParams phi{1.0, 1.0};
};

struct SamplerConfig {
  int n_iterations = 1000;
  int burn_in = 100;
  int thin_interval = 5;
  int n_chains = 1;
  std::uint64_t seed = 1;
  Hyperparams hyper;
  InnovationStrategy innovation_strategy = InnovationStrategy::exact_enumeration;
  int metropolis_threshold = 30;
  InitDistributions init;
  bool parallel_innovations = true;
  bool scale_move = true;
  bool keep_innovations = false;
  bool check_invariants = false;

  void validate() const;
  /// Number of stored draws per chain.
  int draws_per_chain() const;
};

struct Draw {
  int chain = 0;
  int iteration = 0;
  std::vector<double> alpha;
  std::vector<int> z;
  std::vector<double> phi_star;
  std::vector<double> theta;
  double tau = 1.0;
  std::optional<CountMatrix> innovations;

  std::size_t num_clusters() const { return phi_star.size(); }
  bool operator==(const Draw&) const = default;
};

/// Per-iteration scalar traces of one chain, burn-in included.
struct ChainTrace {
  int chain = 0;
  std::vector<int> num_clusters;
  std::vector<double> lambda_sum;
};

struct PosteriorDraws {
  RateMode mode = RateMode::plain;
  std::size_t num_series = 0;
  std::optional<std::vector<double>> exposure;
  std::vector<Draw> draws;
  std::vector<ChainTrace> traces;  // not persisted

  /// lambda_l in draw d (exposure-scaled in covariate mode).
  double lambda(const Draw& d, std::size_t l) const;
  double lambda_sum(const Draw& d) const;
  /// Draws of one chain, in iteration order.
  std::vector<const Draw*> chain(int index) const;
  int num_chains() const;
};

/// Draws a starting state from `config.init`.
ModelState initial_state(const CountPanel& panel, const SamplerConfig& config, Rng& rng);

/// One full sweep of the six steps; `sweep` indexes the innovation streams.
void gibbs_sweep(const CountPanel& panel, const SamplerConfig& config, std::uint64_t chain_seed,
                 std::uint64_t sweep, ModelState& state, Rng& rng);

/// Runs chain `chain_index` with seed derive_seed(config.seed, chain_index).
PosteriorDraws run_chain(const CountPanel& panel, const SamplerConfig& config, int chain_index = 0);

/// Runs config.n_chains independent chains (OpenMP across chains) and
/// concatenates their draws in chain order.
PosteriorDraws run_chains(const CountPanel& panel, const SamplerConfig& config);

}  // namespace poinar
