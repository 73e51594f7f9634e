#include "poinar/innovations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace poinar {

namespace {

constexpr int kFactorialTable = 4096;

const std::array<double, kFactorialTable>& factorial_table() {
  static const std::array<double, kFactorialTable> table = [] {
    std::array<double, kFactorialTable> t{};
    t[0] = 0.0;
    for (int n = 1; n < kFactorialTable; ++n) t[n] = t[n - 1] + std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

double clamp_alpha(double alpha) { return std::clamp(alpha, kAlphaClamp, 1.0 - kAlphaClamp); }

void check_args(int y_prev, int y_curr, double alpha, double rate) {
  if (y_prev < 0 || y_curr < 0) throw std::domain_error("counts must be nonnegative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("thinning probability outside [0,1]");
  if (!(rate > 0.0)) throw std::domain_error("innovation rate must be positive");
}

// Fills log weights over the support [lo, y_curr]; returns lo.
int log_weights(int y_prev, int y_curr, double alpha, double rate, std::vector<double>& out) {
  const int lo = std::max(0, y_curr - y_prev);
  const double a = clamp_alpha(alpha);
  const double log_odds = std::log(rate) + std::log1p(-a) - std::log(a);
  out.resize(static_cast<std::size_t>(y_curr - lo + 1));
  for (int e = lo; e <= y_curr; ++e) {
    out[static_cast<std::size_t>(e - lo)] = -log_factorial(e) - log_factorial(y_curr - e) -
                                            log_factorial(y_prev - y_curr + e) + e * log_odds;
  }
  return lo;
}

double log_binomial_pmf(int k, int n, double p) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

int sample_from_log_weights(std::vector<double>& w, Rng& rng) {
  const double mx = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - mx);
    total += v;
  }
  double u = draw_uniform(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

void sweep_series(const CountPanel& panel, const InnovationSweep& sweep, std::size_t l,
                  CountMatrix& innovations, std::vector<double>& scratch) {
  Rng rng(derive_seed(sweep.chain_seed, sweep.sweep + 1, l + 1));
  const int* y = panel.counts.row(l);
  int* eps = innovations.row(l);
  const double alpha = (*sweep.alpha)[l];
  const double lambda = (*sweep.rates)[l];
  const std::size_t T = panel.num_weeks();

  eps[0] = y[0];
  for (std::size_t t = 1; t < T; ++t) {
    const int prev = y[t - 1];
    const int curr = y[t];
    if (curr == 0) {
      eps[t] = 0;
      continue;
    }
    if (prev == 0) {
      eps[t] = curr;
      continue;
    }
    const double rate = lambda * (*sweep.theta)[static_cast<std::size_t>(panel.season_of[t] - 1)];
    if (sweep.strategy == InnovationStrategy::metropolis_poisson && curr > sweep.metropolis_threshold) {
      const int lo = std::max(0, curr - prev);
      const int start = std::clamp(eps[t], lo, curr);
      eps[t] = metropolis_innovation(prev, curr, alpha, rate, start, rng);
    } else {
      const int lo = log_weights(prev, curr, alpha, rate, scratch);
      eps[t] = lo + sample_from_log_weights(scratch, rng);
    }
  }
}

void check_sweep(const CountPanel& panel, const InnovationSweep& sweep, const CountMatrix& innovations) {
  if (!sweep.alpha || !sweep.rates || !sweep.theta) throw std::invalid_argument("innovation sweep is missing parameters");
  if (innovations.rows() != panel.num_series() || innovations.cols() != panel.num_weeks())
    throw std::invalid_argument("innovation matrix shape differs from panel");
  // Validated up front: nothing may throw inside the parallel region.
  if (sweep.alpha->size() != panel.num_series() || sweep.rates->size() != panel.num_series() ||
      sweep.theta->size() != static_cast<std::size_t>(kMonths))
    throw std::invalid_argument("innovation sweep parameter lengths differ from panel");
  for (double a : *sweep.alpha)
    if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("thinning probability outside [0,1]");
  for (double r : *sweep.rates)
    if (!(r > 0.0)) throw std::domain_error("innovation rate must be positive");
  for (double th : *sweep.theta)
    if (!(th > 0.0)) throw std::domain_error("seasonal effect must be positive");
  for (int v : panel.counts.values())
    if (v < 0) throw std::domain_error("counts must be nonnegative");
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("factorial of a negative number");
  if (n < kFactorialTable) return factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

InnovationPmf innovation_pmf(int y_prev, int y_curr, double alpha, double rate) {
  check_args(y_prev, y_curr, alpha, rate);
  InnovationPmf pmf;
  if (y_curr == 0) {
    pmf.lo = 0;
    pmf.p = {1.0};
    return pmf;
  }
  if (y_prev == 0) {
    pmf.lo = y_curr;
    pmf.p = {1.0};
    return pmf;
  }
  pmf.lo = log_weights(y_prev, y_curr, alpha, rate, pmf.p);
  const double mx = *std::max_element(pmf.p.begin(), pmf.p.end());
  double total = 0.0;
  for (double& v : pmf.p) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : pmf.p) v /= total;
  return pmf;
}

int sample_innovation(int y_prev, int y_curr, double alpha, double rate, Rng& rng) {
  check_args(y_prev, y_curr, alpha, rate);
  if (y_curr == 0) return 0;
  if (y_prev == 0) return y_curr;
  std::vector<double> w;
  const int lo = log_weights(y_prev, y_curr, alpha, rate, w);
  return lo + sample_from_log_weights(w, rng);
}

int metropolis_innovation(int y_prev, int y_curr, double alpha, double rate, int current, Rng& rng) {
  check_args(y_prev, y_curr, alpha, rate);
  if (y_curr == 0) return 0;
  if (y_prev == 0) return y_curr;
  const int lo = std::max(0, y_curr - y_prev);
  if (current < lo || current > y_curr) throw std::domain_error("current innovation outside its support");
  const int proposal = draw_poisson(rng, rate);
  const double u = draw_uniform(rng);
  if (proposal < lo || proposal > y_curr) return current;
  // Poisson proposal cancels the Poisson prior; only the survivor term remains.
  const double a = clamp_alpha(alpha);
  const double log_ratio =
      log_binomial_pmf(y_curr - proposal, y_prev, a) - log_binomial_pmf(y_curr - current, y_prev, a);
  return std::log(u) < log_ratio ? proposal : current;
}

void sample_innovations_serial(const CountPanel& panel, const InnovationSweep& sweep,
                               CountMatrix& innovations) {
  check_sweep(panel, sweep, innovations);
  std::vector<double> scratch;
  for (std::size_t l = 0; l < panel.num_series(); ++l) sweep_series(panel, sweep, l, innovations, scratch);
}

void sample_innovations_parallel(const CountPanel& panel, const InnovationSweep& sweep,
                                 CountMatrix& innovations) {
  check_sweep(panel, sweep, innovations);
  const long L = static_cast<long>(panel.num_series());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 4)
    for (long l = 0; l < L; ++l) sweep_series(panel, sweep, static_cast<std::size_t>(l), innovations, scratch);
  }
}

}  // namespace poinar
