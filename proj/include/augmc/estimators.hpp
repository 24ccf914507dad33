#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "augmc/chain.hpp"
#include "augmc/errors.hpp"

namespace augmc {

inline double ergodic_average(std::span<const double> series) {
  if (series.empty()) throw argument_error("ergodic_average: empty series");
  double sum = 0.0;
  for (const double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

// Mean of E[g(theta) | y, z_i] over latent draws: the Rao-Blackwellized
// counterpart of averaging g(theta_i) directly.
template <class Z, class CondExp>
double rao_blackwell_average(std::span<const Z> z_draws, CondExp&& cond_exp) {
  if (z_draws.empty())
    throw argument_error("rao_blackwell_average: empty trace");
  double sum = 0.0;
  for (const auto& z : z_draws) sum += cond_exp(z);
  return sum / static_cast<double>(z_draws.size());
}

template <class Z, class CondExp>
double rao_blackwell_average(const chain_trace<Z>& z_trace,
                             CondExp&& cond_exp) {
  return rao_blackwell_average(std::span<const Z>(z_trace.states), cond_exp);
}

// Sample autocorrelations at lags 0..max_lag with the biased 1/n
// normalization (keeps the estimated sequence positive semidefinite).
inline std::vector<double> acf(std::span<const double> series,
                               std::size_t max_lag) {
  const std::size_t n = series.size();
  if (max_lag >= n) throw argument_error("acf: max_lag must be < n");
  double mean = 0.0;
  for (const double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (const double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) throw argument_error("acf: series has zero variance");
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      ck += (series[t] - mean) * (series[t + k] - mean);
    ck /= static_cast<double>(n);
    rho[k] = ck / c0;
  }
  return rho;
}

struct iact_result {
  double tau = 1.0;     // integrated autocorrelation time
  double ess = 0.0;     // n / tau
  std::size_t window = 0;
  bool reliable = true;  // false if the window rule hit n/2 first
};

// Integrated autocorrelation time 1 + 2 sum rho(k), truncated with the
// self-consistent window rule: stop at the smallest K >= 5 * tau(K).
inline iact_result iact(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 100) throw argument_error("iact: need at least 100 samples");
  const std::size_t max_window = n / 2;
  const std::vector<double> rho = acf(series, max_window);
  iact_result result;
  double tau = 1.0;
  std::size_t k = 1;
  for (; k <= max_window; ++k) {
    tau += 2.0 * rho[k];
    if (static_cast<double>(k) >= 5.0 * tau) break;
  }
  if (k > max_window) {
    result.reliable = false;
    k = max_window;
  }
  result.tau = tau;
  result.window = k;
  result.ess = tau > 0.0 ? static_cast<double>(n) / tau
                         : std::numeric_limits<double>::infinity();
  if (tau <= 0.0) result.reliable = false;
  return result;
}

inline double sample_variance(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw argument_error("sample_variance: need at least 2 values");
  double mean = 0.0;
  for (const double v : series) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double v : series) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(n - 1);
}

// Monte Carlo standard error of the series mean by non-overlapping batch
// means: sd of the batch averages over sqrt(#batches).
inline double batch_means_se(std::span<const double> series,
                             std::size_t n_batches = 50) {
  if (n_batches < 2)
    throw argument_error("batch_means_se: need at least 2 batches");
  const std::size_t n = series.size();
  if (n < 2 * n_batches)
    throw argument_error("batch_means_se: series too short for batch count");
  const std::size_t batch_len = n / n_batches;  // drop the remainder
  std::vector<double> batch(n_batches, 0.0);
  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t t = 0; t < batch_len; ++t)
      batch[b] += series[b * batch_len + t];
    batch[b] /= static_cast<double>(batch_len);
  }
  return std::sqrt(sample_variance(batch) / static_cast<double>(n_batches));
}

struct paired_variance_test {
  double t_stat = 0.0;   // negative favors Var[first] < Var[second]
  std::size_t dof = 0;
};

// Morgan-Pitman test for equality of variances of paired samples: the
// correlation of (x+y, x-y) estimates Var[x] - Var[y] up to scale, so the
// usual correlation t statistic applies.
inline paired_variance_test morgan_pitman(std::span<const double> x,
                                          std::span<const double> y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw argument_error("morgan_pitman: length mismatch");
  if (n < 3) throw argument_error("morgan_pitman: need at least 3 pairs");
  double ms = 0.0, md = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ms += x[i] + y[i];
    md += x[i] - y[i];
  }
  ms /= static_cast<double>(n);
  md /= static_cast<double>(n);
  double css = 0.0, cdd = 0.0, csd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = x[i] + y[i] - ms;
    const double d = x[i] - y[i] - md;
    css += s * s;
    cdd += d * d;
    csd += s * d;
  }
  if (css <= 0.0 || cdd <= 0.0)
    throw argument_error("morgan_pitman: degenerate series");
  const double r = csd / std::sqrt(css * cdd);
  paired_variance_test result;
  result.dof = n - 2;
  const double denom = std::max(1e-300, 1.0 - r * r);
  result.t_stat = r * std::sqrt(static_cast<double>(n - 2) / denom);
  return result;
}

// Total variation distance between two laws on the same finite support,
// both given as probability vectors over a shared state indexing.
inline double tv_distance(std::span<const double> empirical,
                          std::span<const double> exact) {
  if (empirical.size() != exact.size())
    throw argument_error("tv_distance: mismatched supports");
  if (empirical.empty()) throw argument_error("tv_distance: empty support");
  double sum = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i)
    sum += std::abs(empirical[i] - exact[i]);
  return 0.5 * sum;
}

// Normalized frequency vector over n_states from a sequence of state indices.
inline std::vector<double> histogram(std::span<const std::size_t> indices,
                                     std::size_t n_states) {
  if (indices.empty()) throw argument_error("histogram: empty sample");
  std::vector<double> h(n_states, 0.0);
  for (const std::size_t s : indices) {
    if (s >= n_states) throw argument_error("histogram: index out of range");
    h[s] += 1.0;
  }
  for (double& v : h) v /= static_cast<double>(indices.size());
  return h;
}

}  // namespace augmc
