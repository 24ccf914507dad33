#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/rng.hpp"

namespace augmc {

// Kept states of one chain.  Burn-in states are applied but never stored, so
// states.size() == n_keep always.
template <class State>
struct chain_trace {
  std::vector<State> states;
  std::string kernel_id;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t n_burn = 0;
  std::size_t thin = 1;
  // Scalar summaries recorded alongside the states (one value per kept state).
  std::map<std::string, std::vector<double>> summaries;
};

// Applies `kernel` n_burn + n_keep * thin times from `init`, recording every
// thin-th post-burn-in state.  Kernel signature: State(State, rng_stream&).
template <class State, class Kernel>
chain_trace<State> run_chain(Kernel&& kernel, State init, std::size_t n_burn,
                             std::size_t n_keep, std::size_t thin,
                             rng_stream& rng, std::string kernel_id = "") {
  if (n_keep < 1) throw argument_error("run_chain: n_keep must be >= 1");
  if (thin < 1) throw argument_error("run_chain: thin must be >= 1");
  chain_trace<State> trace;
  trace.kernel_id = std::move(kernel_id);
  trace.seed = rng.seed();
  trace.stream_id = rng.stream_id();
  trace.n_burn = n_burn;
  trace.thin = thin;
  trace.states.reserve(n_keep);
  State cur = std::move(init);
  const std::size_t total = n_burn + n_keep * thin;
  for (std::size_t i = 1; i <= total; ++i) {
    try {
      cur = kernel(std::move(cur), rng);
    } catch (const std::exception& e) {
      throw error("kernel failed at iteration " + std::to_string(i) + ": " +
                  e.what());
    }
    if (i > n_burn && (i - n_burn) % thin == 0) trace.states.push_back(cur);
  }
  return trace;
}

// Same iteration schedule, but stores only named scalar observables of each
// kept state.  Useful when states are large (lattices) and only summaries
// are wanted.
template <class State, class Kernel, class Observables>
std::map<std::string, std::vector<double>> run_chain_observables(
    Kernel&& kernel, State init, std::size_t n_burn, std::size_t n_keep,
    std::size_t thin, rng_stream& rng, const Observables& observables) {
  if (n_keep < 1) throw argument_error("run_chain: n_keep must be >= 1");
  if (thin < 1) throw argument_error("run_chain: thin must be >= 1");
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, fn] : observables) {
    (void)fn;
    out[name].reserve(n_keep);
  }
  State cur = std::move(init);
  const std::size_t total = n_burn + n_keep * thin;
  for (std::size_t i = 1; i <= total; ++i) {
    try {
      cur = kernel(std::move(cur), rng);
    } catch (const std::exception& e) {
      throw error("kernel failed at iteration " + std::to_string(i) + ": " +
                  e.what());
    }
    if (i > n_burn && (i - n_burn) % thin == 0)
      for (const auto& [name, fn] : observables) out[name].push_back(fn(cur));
  }
  return out;
}

// Pulls a scalar series out of a stored trace.
template <class State, class F>
std::vector<double> extract(const chain_trace<State>& trace, F&& g) {
  std::vector<double> out;
  out.reserve(trace.states.size());
  for (const auto& s : trace.states) out.push_back(g(s));
  return out;
}

}  // namespace augmc
