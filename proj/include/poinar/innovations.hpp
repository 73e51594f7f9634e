#pragma once

#include <cstdint>
#include <vector>

#include "poinar/random.hpp"
#include "poinar/types.hpp"

namespace poinar {

/// log(n!) from a lazily built table, falling back to lgamma for large n.
double log_factorial(int n);

/// Conditional pmf of the innovation at one transition, given the previous
/// and current counts. Support is [lo, lo + p.size()).
struct InnovationPmf {
  int lo = 0;
  std::vector<double> p;

  int hi() const { return lo + static_cast<int>(p.size()) - 1; }
  double at(int eps) const {
    return (eps < lo || eps > hi()) ? 0.0 : p[static_cast<std::size_t>(eps - lo)];
  }
};

/// Thinning values closer than this to 0 or 1 are clamped before forming
/// the (1 - alpha) / alpha odds.
inline constexpr double kAlphaClamp = 1e-12;

/// Throws std::domain_error when rate <= 0 or a count is negative.
InnovationPmf innovation_pmf(int y_prev, int y_curr, double alpha, double rate);

/// Exact draw from innovation_pmf.
int sample_innovation(int y_prev, int y_curr, double alpha, double rate, Rng& rng);

/// One independence Metropolis-Hastings step with a Poisson(rate) proposal,
/// started from `current` (which must lie in the support).
int metropolis_innovation(int y_prev, int y_curr, double alpha, double rate, int current, Rng& rng);

enum class InnovationStrategy { exact_enumeration, metropolis_poisson };

/// Everything one innovation sweep needs besides the counts.
struct InnovationSweep {
  const std::vector<double>* alpha = nullptr;   // length L
  const std::vector<double>* rates = nullptr;   // lambda_l (already exposure-scaled)
  const std::vector<double>* theta = nullptr;   // length 12
  InnovationStrategy strategy = InnovationStrategy::exact_enumeration;
  int metropolis_threshold = 30;  // y_curr above this uses MH under metropolis_poisson
  std::uint64_t chain_seed = 0;
  std::uint64_t sweep = 0;
};

/// Resamples every innovation of `innovations` (L x T). Series l draws from
/// its own stream derive_seed(chain_seed, sweep + 1, l + 1), so the serial
/// and parallel kernels produce identical output. Column 0 is set to Y_{l,1}.
void sample_innovations_serial(const CountPanel& panel, const InnovationSweep& sweep,
                               CountMatrix& innovations);

/// OpenMP kernel over series; falls back to serial when built without OpenMP.
void sample_innovations_parallel(const CountPanel& panel, const InnovationSweep& sweep,
                                 CountMatrix& innovations);

}  // namespace poinar
