#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/rng.hpp"
#include "augmc/target.hpp"

namespace augmc {

struct accept_counter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed;
  }
};

// One Metropolis move with a symmetric proposal.  Acceptance is decided in
// the log domain: accept iff log(u) < log pi(proposed) - log pi(current).
// A proposal landing outside the support (log target -inf) is rejected and
// counted like any other rejection.
//
// LogTarget: double(const State&).  Proposal: State(const State&, rng_stream&).
template <class State, class LogTarget, class Proposal>
State metropolis_step(const LogTarget& log_target, State current,
                      const Proposal& propose, rng_stream& rng,
                      accept_counter* counter = nullptr,
                      double* cached_log_target = nullptr) {
  const double lp_cur = (cached_log_target != nullptr &&
                         std::isfinite(*cached_log_target))
                            ? *cached_log_target
                            : log_target(current);
  State proposed = propose(current, rng);
  const double lp_prop = log_target(proposed);
  if (counter != nullptr) ++counter->proposed;
  const double u = rng.uniform01();
  if (lp_prop > -std::numeric_limits<double>::infinity() &&
      std::log(u) < lp_prop - lp_cur) {
    if (counter != nullptr) ++counter->accepted;
    if (cached_log_target != nullptr) *cached_log_target = lp_prop;
    return proposed;
  }
  if (cached_log_target != nullptr) *cached_log_target = lp_cur;
  return current;
}

// Symmetric random-walk proposals over real vectors.
struct gaussian_walk_proposal {
  std::vector<double> step;  // per-component sd
  std::vector<double> operator()(const std::vector<double>& x,
                                 rng_stream& rng) const {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += step[i % step.size()] * rng.normal();
    return y;
  }
};

struct uniform_walk_proposal {
  std::vector<double> radius;  // per-component half-width
  std::vector<double> operator()(const std::vector<double>& x,
                                 rng_stream& rng) const {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += radius[i % radius.size()] * rng.uniform(-1.0, 1.0);
    return y;
  }
};

enum class walk_kind { gaussian, uniform };

// One systematic sweep of component-wise random-walk Metropolis moves.
// Component i gets a symmetric perturbation of scale step_sizes[i]; each
// move is accepted or rejected against the full target.
template <class LogTarget>
std::vector<double> single_site_scan(const LogTarget& log_target,
                                     std::vector<double> x,
                                     std::span<const double> step_sizes,
                                     rng_stream& rng,
                                     std::span<accept_counter> counters = {},
                                     walk_kind kind = walk_kind::gaussian) {
  if (x.empty()) throw argument_error("single_site_scan: empty state");
  if (step_sizes.size() != x.size())
    throw argument_error("single_site_scan: step_sizes size != dimension");
  if (!counters.empty() && counters.size() != x.size())
    throw argument_error("single_site_scan: counters size != dimension");
  double lp_cur = log_target(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double old = x[i];
    const double delta = kind == walk_kind::gaussian
                             ? step_sizes[i] * rng.normal()
                             : step_sizes[i] * rng.uniform(-1.0, 1.0);
    x[i] = old + delta;
    const double lp_prop = log_target(x);
    if (!counters.empty()) ++counters[i].proposed;
    const double u = rng.uniform01();
    if (lp_prop > -std::numeric_limits<double>::infinity() &&
        std::log(u) < lp_prop - lp_cur) {
      lp_cur = lp_prop;
      if (!counters.empty()) ++counters[i].accepted;
    } else {
      x[i] = old;
    }
  }
  return x;
}

// One full conditional per component: draws component i given all others.
struct full_conditional_set {
  using component_sampler =
      std::function<double(std::span<const double>, rng_stream&)>;
  std::vector<component_sampler> samplers;
  std::size_t dimension() const { return samplers.size(); }
};

enum class scan_order { systematic, random_permutation };

// One Gibbs sweep.  Systematic order visits components 0..d-1; random order
// draws a fresh permutation for the sweep.  Either way the target joint law
// is invariant (scans compose conditional kernels, so invariance rather than
// reversibility is the contract).
inline std::vector<double> gibbs_scan(const full_conditional_set& conditionals,
                                      std::vector<double> x, scan_order order,
                                      rng_stream& rng) {
  const std::size_t d = conditionals.dimension();
  if (d == 0) throw argument_error("gibbs_scan: no conditionals");
  if (x.size() != d)
    throw argument_error("gibbs_scan: state size != number of conditionals");
  std::vector<std::size_t> visit(d);
  std::iota(visit.begin(), visit.end(), std::size_t{0});
  if (order == scan_order::random_permutation) {
    for (std::size_t i = d; i > 1; --i) {
      const std::size_t j = rng.uniform_below(i);
      std::swap(visit[i - 1], visit[j]);
    }
  }
  for (const std::size_t i : visit) {
    try {
      x[i] = conditionals.samplers[i](x, rng);
    } catch (const std::exception& e) {
      throw error("gibbs_scan: conditional for component " +
                  std::to_string(i) + " failed: " + e.what());
    }
  }
  return x;
}

template <class State>
struct anneal_result {
  State best_state;
  double best_energy = std::numeric_limits<double>::infinity();
  // energy_trace[0] is the initial energy, then one entry per schedule step.
  std::vector<double> energy_trace;
};

// Simulated annealing: one Metropolis move per schedule entry, against the
// Boltzmann weight exp(-E/T) at that entry's temperature.  Returns the
// best-energy state visited, which is more robust than the final state when
// the schedule cools quickly.
template <class State, class Energy, class Proposal>
anneal_result<State> anneal(const Energy& energy,
                            std::span<const double> schedule, State init,
                            const Proposal& propose, rng_stream& rng) {
  if (schedule.empty()) throw argument_error("anneal: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0))
      throw argument_error("anneal: temperatures must be positive");
    if (i > 0 && schedule[i] > schedule[i - 1])
      throw argument_error("anneal: schedule must be non-increasing");
  }
  anneal_result<State> result;
  State cur = std::move(init);
  double cur_e = energy(cur);
  result.best_state = cur;
  result.best_energy = cur_e;
  result.energy_trace.reserve(schedule.size() + 1);
  result.energy_trace.push_back(cur_e);
  for (const double temp : schedule) {
    State prop = propose(cur, rng);
    const double prop_e = energy(prop);
    const double u = rng.uniform01();
    if (std::log(u) < (cur_e - prop_e) / temp) {
      cur = std::move(prop);
      cur_e = prop_e;
    }
    result.energy_trace.push_back(cur_e);
    if (cur_e < result.best_energy) {
      result.best_energy = cur_e;
      result.best_state = cur;
    }
  }
  return result;
}

}  // namespace augmc
