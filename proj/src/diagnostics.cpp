#include "poinar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace poinar {

double psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("psrf needs at least two chains");
  const std::size_t n = chains[0].size();
  if (n < 2) throw std::invalid_argument("psrf needs chains of length at least two");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("psrf chains must have equal length");

  std::vector<double> means(m), vars(m);
  for (std::size_t j = 0; j < m; ++j) {
    means[j] = std::accumulate(chains[j].begin(), chains[j].end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : chains[j]) ss += (v - means[j]) * (v - means[j]);
    vars[j] = ss / static_cast<double>(n - 1);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(m);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  const double B = static_cast<double>(n) * between / static_cast<double>(m - 1);
  const double W = std::accumulate(vars.begin(), vars.end(), 0.0) / static_cast<double>(m);
  if (W == 0.0) return B == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return std::sqrt(((nn - 1.0) / nn * W + B / nn) / W);
}

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  if (rows == 0) return {};
  const std::size_t cols = cost[0].size();
  for (const auto& r : cost)
    if (r.size() != cols) throw std::invalid_argument("assignment cost matrix is ragged");
  if (rows > cols) {
    std::vector<std::vector<double>> transposed(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) transposed[j][i] = cost[i][j];
    const std::vector<int> col_to_row = solve_assignment(transposed);
    std::vector<int> out(rows, -1);
    for (std::size_t j = 0; j < cols; ++j)
      if (col_to_row[j] >= 0) out[static_cast<std::size_t>(col_to_row[j])] = static_cast<int>(j);
    return out;
  }

  // Shortest augmenting path with potentials; 1-based, n = rows <= m = cols.
  const std::size_t n = rows, m = cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) out[p[j] - 1] = static_cast<int>(j - 1);
  return out;
}

double hamming_error(const std::vector<int>& z_est, const std::vector<int>& z_true) {
  if (z_est.size() != z_true.size()) throw std::invalid_argument("hamming_error: length mismatch");
  if (z_est.empty()) return 0.0;
  const int ke = *std::max_element(z_est.begin(), z_est.end()) + 1;
  const int kt = *std::max_element(z_true.begin(), z_true.end()) + 1;
  if (*std::min_element(z_est.begin(), z_est.end()) < 0 || *std::min_element(z_true.begin(), z_true.end()) < 0)
    throw std::invalid_argument("hamming_error: labels must be nonnegative");
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(ke), std::vector<double>(static_cast<std::size_t>(kt), 0.0));
  for (std::size_t i = 0; i < z_est.size(); ++i)
    cost[static_cast<std::size_t>(z_est[i])][static_cast<std::size_t>(z_true[i])] -= 1.0;
  const std::vector<int> match = solve_assignment(cost);
  double overlap = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) overlap -= cost[r][static_cast<std::size_t>(match[r])];
  return 1.0 - overlap / static_cast<double>(z_est.size());
}

std::size_t representative_index(const PosteriorDraws& draws) {
  const std::size_t D = draws.draws.size();
  if (D == 0) throw std::invalid_argument("representative assignment needs at least one draw");
  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Draw& da = draws.draws[a];
    const Draw& db = draws.draws[b];
    return std::tie(da.chain, da.iteration) < std::tie(db.chain, db.iteration);
  });

  std::vector<double> total(D, 0.0);
  for (std::size_t a = 0; a < D; ++a)
    for (std::size_t b = a + 1; b < D; ++b) {
      const double h = hamming_error(draws.draws[a].z, draws.draws[b].z);
      total[a] += h;
      total[b] += h;
    }
  std::size_t best = order[0];
  for (std::size_t idx : order)
    if (total[idx] < total[best]) best = idx;
  return best;
}

std::vector<int> representative_assignment(const PosteriorDraws& draws) {
  return draws.draws[representative_index(draws)].z;
}

ClusterHistogram cluster_count_histogram(const std::vector<int>& counts) {
  ClusterHistogram h;
  if (counts.empty()) return h;
  std::map<int, std::size_t> tally;
  for (int k : counts) ++tally[k];
  std::size_t best = 0;
  for (const auto& [k, c] : tally) {
    h.frequency[k] = static_cast<double>(c) / static_cast<double>(counts.size());
    if (c > best) {
      best = c;
      h.mode = k;
    }
  }
  return h;
}

ClusterHistogram cluster_count_histogram(const PosteriorDraws& draws) {
  std::vector<int> counts;
  counts.reserve(draws.draws.size());
  for (const Draw& d : draws.draws) counts.push_back(static_cast<int>(d.num_clusters()));
  return cluster_count_histogram(counts);
}

namespace {

struct Accumulator {
  std::vector<double> errors;

  void fill(GroupStats& g) const {
    g.n = errors.size();
    if (errors.empty()) return;
    const double n = static_cast<double>(errors.size());
    double sum = 0.0, sq = 0.0;
    for (double e : errors) {
      sum += e;
      sq += e * e;
    }
    g.bias = sum / n;
    const double mse = sq / n;
    g.rmse = std::sqrt(mse);
    if (errors.size() < 2) return;  // standard errors need two points; left at 0
    double var_e = 0.0, var_sq = 0.0;
    for (double e : errors) {
      var_e += (e - g.bias) * (e - g.bias);
      var_sq += (e * e - mse) * (e * e - mse);
    }
    g.bias_se = std::sqrt(var_e / (n - 1.0) / n);
    const double mse_se = std::sqrt(var_sq / (n - 1.0) / n);
    g.rmse_se = g.rmse > 0.0 ? mse_se / (2.0 * g.rmse) : 0.0;
  }
};

}  // namespace

EvalReport forecast_metrics(const std::vector<double>& predictions, const std::vector<double>& truths,
                            const std::vector<int>& last_values, int last_value_cap) {
  if (predictions.size() != truths.size() || predictions.size() != last_values.size())
    throw std::invalid_argument("forecast_metrics: input lengths differ");
  EvalReport r;
  r.n = predictions.size();
  r.last_value_cap = last_value_cap;
  Accumulator all;
  std::map<int, Accumulator> groups;
  double ape_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double err = predictions[i] - truths[i];
    all.errors.push_back(err);
    int key = last_values[i];
    if (last_value_cap >= 0) key = std::min(key, last_value_cap);
    groups[key].errors.push_back(err);
    if (truths[i] > 0.0) {
      ape_sum += std::abs(err) / truths[i];
      ++r.ape_n;
    } else {
      ++r.ape_skipped;
    }
  }
  GroupStats overall;
  all.fill(overall);
  r.rmse = overall.rmse;
  r.rmse_se = overall.rmse_se;
  r.bias = overall.bias;
  r.bias_se = overall.bias_se;
  r.ape = r.ape_n ? ape_sum / static_cast<double>(r.ape_n) : 0.0;
  for (const auto& [key, acc] : groups) {
    GroupStats g;
    acc.fill(g);
    g.frequency = static_cast<double>(g.n) / static_cast<double>(r.n);
    r.by_last_value[key] = g;
  }
  return r;
}

}  // namespace poinar
