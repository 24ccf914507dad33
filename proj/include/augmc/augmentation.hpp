#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/rng.hpp"

namespace augmc {

// An augmented model exposes a pair of mutually consistent conditional
// samplers for a joint p(theta, z | y): theta given z and z given theta.
template <class M>
concept augmented_model =
    requires(const M& m, const typename M::theta_type& t,
             const typename M::z_type& z, rng_stream& r) {
      { m.sample_z(t, r) } -> std::convertible_to<typename M::z_type>;
      { m.sample_theta(z, r) } -> std::convertible_to<typename M::theta_type>;
    };

// Optional capability: density evaluator for p(theta | y, z).
template <class M>
concept has_theta_density =
    requires(const M& m, const typename M::theta_type& t,
             const typename M::z_type& z) {
      { m.log_theta_density(t, z) } -> std::convertible_to<double>;
    };

// Optional capability: expected complete-data sufficient statistics plus a
// closed-form M-step and an observed-data log-likelihood for monitoring.
template <class M>
concept em_capable =
    requires(const M& m, const typename M::theta_type& t,
             const typename M::suff_type& s) {
      { m.expected_suff(t) } -> std::convertible_to<typename M::suff_type>;
      { m.m_step(s) } -> std::convertible_to<typename M::theta_type>;
      { m.observed_loglik(t) } -> std::convertible_to<double>;
    };

template <class Theta>
struct population {
  std::vector<Theta> values;
  std::uint64_t generation = 0;
};

enum class selection_mode { with_replacement, without_replacement };

// One sweep of the two-block Gibbs chain: z from p(z|theta,y), then theta
// from p(theta|y,z).
template <augmented_model Model>
std::pair<typename Model::theta_type, typename Model::z_type>
two_component_gibbs(const Model& model,
                    std::pair<typename Model::theta_type,
                              typename Model::z_type> state,
                    rng_stream& rng) {
  state.second = model.sample_z(state.first, rng);
  state.first = model.sample_theta(state.second, rng);
  return state;
}

// One iteration over the population of mixture values: per slot, pick a
// current theta (with-replacement: uniform multinomial; without-replacement:
// slot j keeps ancestral line j), draw z ~ p(z|theta,y), then a fresh
// theta ~ p(theta|y,z). Exactly one z-draw per slot, so m = 1 degenerates to
// two_component_gibbs draw for draw: the selection consumes no randomness
// when only one value exists.
template <augmented_model Model>
population<typename Model::theta_type> da_iterate(
    const Model& model, const population<typename Model::theta_type>& pop,
    selection_mode mode, rng_stream& rng,
    std::vector<typename Model::z_type>* z_out = nullptr) {
  const std::size_t m = pop.values.size();
  if (m == 0) throw argument_error("da_iterate: empty population");
  population<typename Model::theta_type> next;
  next.values.reserve(m);
  next.generation = pop.generation + 1;
  if (z_out) {
    z_out->clear();
    z_out->reserve(m);
  }
  for (std::size_t slot = 0; slot < m; ++slot) {
    std::size_t pick = slot;
    if (mode == selection_mode::with_replacement && m > 1)
      pick = static_cast<std::size_t>(rng.uniform_below(m));
    try {
      auto z = model.sample_z(pop.values[pick], rng);
      next.values.push_back(model.sample_theta(z, rng));
      if (z_out) z_out->push_back(std::move(z));
    } catch (const std::exception& e) {
      throw error("da_iterate: slot " + std::to_string(slot) + ": " +
                  e.what());
    }
  }
  return next;
}

// Per-slot stream variant for the embarrassingly parallel case: slot j is
// the j-th independent chain and draws only from slot_rngs[j].
template <augmented_model Model>
population<typename Model::theta_type> da_iterate(
    const Model& model, const population<typename Model::theta_type>& pop,
    std::span<rng_stream> slot_rngs,
    std::vector<typename Model::z_type>* z_out = nullptr) {
  const std::size_t m = pop.values.size();
  if (m == 0) throw argument_error("da_iterate: empty population");
  if (slot_rngs.size() != m)
    throw argument_error("da_iterate: need one stream per slot");
  population<typename Model::theta_type> next;
  next.values.reserve(m);
  next.generation = pop.generation + 1;
  if (z_out) {
    z_out->clear();
    z_out->reserve(m);
  }
  for (std::size_t slot = 0; slot < m; ++slot) {
    try {
      auto z = model.sample_z(pop.values[slot], slot_rngs[slot]);
      next.values.push_back(model.sample_theta(z, slot_rngs[slot]));
      if (z_out) z_out->push_back(std::move(z));
    } catch (const std::exception& e) {
      throw error("da_iterate: slot " + std::to_string(slot) + ": " +
                  e.what());
    }
  }
  return next;
}

// Mixture approximation of the posterior density: (1/m) sum_j p(theta|y,z_j).
template <augmented_model Model>
double predictive_mixture_density(
    const Model& model, std::span<const typename Model::z_type> z_samples,
    const typename Model::theta_type& theta) {
  if (z_samples.empty())
    throw argument_error("predictive_mixture_density: no z samples");
  if constexpr (has_theta_density<Model>) {
    std::vector<double> logs;
    logs.reserve(z_samples.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& z : z_samples) {
      logs.push_back(model.log_theta_density(theta, z));
      max_log = std::max(max_log, logs.back());
    }
    if (!std::isfinite(max_log)) return 0.0;
    double sum = 0.0;
    for (const double l : logs) sum += std::exp(l - max_log);
    return std::exp(max_log) * sum / static_cast<double>(z_samples.size());
  } else {
    throw capability_error(
        "predictive_mixture_density: model has no p(theta|y,z) evaluator");
  }
}

template <class Theta>
struct em_result {
  Theta theta_hat;
  std::vector<double> loglik_trace;
  bool converged = false;
};

// Alternate expected-sufficient-statistics and M-step updates until the
// observed log-likelihood stabilizes. A decrease beyond the 1e-9 slack means
// the model's E/M pieces are inconsistent, which is reported as an error
// rather than tolerated.
template <em_capable Model>
em_result<typename Model::theta_type> em_fit(
    const Model& model, typename Model::theta_type theta, double tol,
    std::size_t max_iter) {
  if (!(tol > 0.0)) throw argument_error("em_fit: tol must be > 0");
  em_result<typename Model::theta_type> result;
  double loglik = model.observed_loglik(theta);
  result.loglik_trace.push_back(loglik);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    theta = model.m_step(model.expected_suff(theta));
    const double next_loglik = model.observed_loglik(theta);
    if (next_loglik < loglik - 1e-9)
      throw numeric_error(
          "em_fit: observed log-likelihood decreased at iteration " +
          std::to_string(iter + 1));
    result.loglik_trace.push_back(next_loglik);
    const double change = std::abs(next_loglik - loglik);
    loglik = next_loglik;
    if (change < tol * std::max(1.0, std::abs(loglik))) {
      result.converged = true;
      break;
    }
  }
  result.theta_hat = std::move(theta);
  return result;
}

// Draw m_out of the given points without replacement, with probability
// proportional to exp(log_ratio). Implemented as an exponential race:
// key_i = Exp(1) / w_i, keep the m_out smallest keys.
template <class Point>
std::vector<Point> sir_resample(std::span<const Point> draws,
                                std::span<const double> log_ratios,
                                std::size_t m_out, rng_stream& rng) {
  const std::size_t m = draws.size();
  if (log_ratios.size() != m)
    throw argument_error("sir_resample: ratio count must match draw count");
  if (m_out >= m)
    throw argument_error("sir_resample: m_out must be < number of draws");
  if (m_out == 0) return {};
  double max_log = -std::numeric_limits<double>::infinity();
  for (const double lr : log_ratios) max_log = std::max(max_log, lr);
  if (!std::isfinite(max_log))
    throw argument_error("sir_resample: all importance ratios are zero");
  std::vector<std::pair<double, std::size_t>> race(m);
  std::size_t n_positive = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = std::exp(log_ratios[i] - max_log);
    const double e = rng.exponential();  // one draw per point, even if w = 0
    race[i] = {w > 0.0 ? e / w : std::numeric_limits<double>::infinity(), i};
    if (w > 0.0) ++n_positive;
  }
  if (n_positive < m_out)
    throw argument_error(
        "sir_resample: fewer than m_out draws with nonzero weight");
  std::partial_sort(race.begin(),
                    race.begin() + static_cast<std::ptrdiff_t>(m_out),
                    race.end());
  std::vector<Point> out;
  out.reserve(m_out);
  for (std::size_t i = 0; i < m_out; ++i) out.push_back(draws[race[i].second]);
  return out;
}

}  // namespace augmc
