#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/kernels.hpp"
#include "augmc/rng.hpp"

namespace augmc {

enum class lattice_kind { ising, potts };

// 2D periodic spin system. Ising spins live in {-1,+1} with
// E = -sum_edges s_a s_b; Potts colors live in {0..q-1} with
// E = sum_edges [s_a != s_b]. The target is pi(x) ~ exp(-coupling * E(x)),
// with coupling the inverse temperature folded together with the
// interaction strength.
//
// Edge convention: one edge per (site, right neighbor) and per
// (site, down neighbor), 2*L^2 edges total. At L = 2 the wraparound makes
// each neighbor pair appear twice; all energy/bond code follows the same
// list, so the conventions stay consistent.
class lattice_model {
 public:
  using spin_t = std::int8_t;
  using config = std::vector<spin_t>;

  lattice_model(lattice_kind kind, std::size_t side, double coupling,
                std::size_t n_colors = 2)
      : kind_(kind), side_(side), coupling_(coupling), n_colors_(n_colors) {
    if (side_ < 1) throw domain_error("lattice_model: side must be >= 1");
    if (kind_ == lattice_kind::ising && n_colors_ != 2)
      throw domain_error("lattice_model: ising has exactly 2 spin values");
    if (kind_ == lattice_kind::potts && n_colors_ < 2)
      throw domain_error("lattice_model: potts needs >= 2 colors");
  }

  lattice_kind kind() const { return kind_; }
  std::size_t side() const { return side_; }
  std::size_t n_sites() const { return side_ * side_; }
  std::size_t states_per_site() const { return n_colors_; }
  double coupling() const { return coupling_; }

  // Spin value for value-index v in 0..states_per_site-1.
  spin_t value(std::size_t v) const {
    if (kind_ == lattice_kind::ising) return v == 0 ? spin_t{-1} : spin_t{+1};
    return static_cast<spin_t>(v);
  }

  std::size_t value_index(spin_t s) const {
    if (kind_ == lattice_kind::ising) return s < 0 ? 0 : 1;
    return static_cast<std::size_t>(s);
  }

  // Neighbors in order up, down, left, right with periodic wraparound.
  std::array<std::size_t, 4> neighbors(std::size_t site) const {
    const std::size_t L = side_;
    const std::size_t r = site / L, c = site % L;
    return {(r + L - 1) % L * L + c, (r + 1) % L * L + c,
            r * L + (c + L - 1) % L, r * L + (c + 1) % L};
  }

  // Edge list: per site, (site, right) then (site, down).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    e.reserve(2 * n_sites());
    const std::size_t L = side_;
    for (std::size_t r = 0; r < L; ++r)
      for (std::size_t c = 0; c < L; ++c) {
        const std::size_t s = r * L + c;
        e.emplace_back(s, r * L + (c + 1) % L);
        e.emplace_back(s, (r + 1) % L * L + c);
      }
    return e;
  }

  config constant_config(spin_t s) const { return config(n_sites(), s); }

  config random_config(rng_stream& rng) const {
    config x(n_sites());
    for (auto& s : x) s = value(rng.uniform_below(n_colors_));
    return x;
  }

  // Interaction energy of a single edge.
  double pair_energy(spin_t a, spin_t b) const {
    if (kind_ == lattice_kind::ising)
      return -static_cast<double>(a) * static_cast<double>(b);
    return a == b ? 0.0 : 1.0;
  }

  double energy(const config& x) const {
    check_config(x);
    double e = 0.0;
    for (const auto& [a, b] : edges()) e += pair_energy(x[a], x[b]);
    return e;
  }

  // O(1) energy change from setting one site, using only its 4 neighbors.
  double energy_delta(const config& x, std::size_t site,
                      spin_t new_value) const {
    check_config(x);
    check_site(site);
    const spin_t old_value = x[site];
    if (new_value == old_value) return 0.0;
    double delta = 0.0;
    for (const std::size_t nb : neighbors(site))
      delta += pair_energy(new_value, x[nb]) - pair_energy(old_value, x[nb]);
    return delta;
  }

  // Heat-bath conditional P(s_site = value(v) | rest) for each value-index v.
  // The oracle transition-row builders use this same vector.
  std::vector<double> conditional_probs(const config& x,
                                        std::size_t site) const {
    check_config(x);
    check_site(site);
    std::vector<double> logw(n_colors_);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n_colors_; ++v) {
      double local = 0.0;
      for (const std::size_t nb : neighbors(site))
        local += pair_energy(value(v), x[nb]);
      logw[v] = -coupling_ * local;
      max_logw = std::max(max_logw, logw[v]);
    }
    double z = 0.0;
    for (double& w : logw) {
      w = std::exp(w - max_logw);
      z += w;
    }
    for (double& w : logw) w /= z;
    return logw;
  }

  // Heat-bath draw from the full conditional at one site (one uniform).
  spin_t full_conditional(const config& x, std::size_t site,
                          rng_stream& rng) const {
    const std::vector<double> p = conditional_probs(x, site);
    return value(sample_categorical(p, rng));
  }

  // Metropolis proposal for one site: Ising flips, Potts picks uniformly
  // among the other colors. Consumes one uniform for the Potts color pick,
  // none for Ising, then one uniform for the accept test.
  bool metropolis_site_update(config& x, std::size_t site, rng_stream& rng,
                              accept_counter* counter = nullptr) const {
    check_site(site);
    spin_t proposal;
    if (kind_ == lattice_kind::ising) {
      proposal = static_cast<spin_t>(-x[site]);
    } else {
      std::size_t v = rng.uniform_below(n_colors_ - 1);
      const std::size_t cur = value_index(x[site]);
      if (v >= cur) ++v;
      proposal = value(v);
    }
    const double delta = energy_delta(x, site, proposal);
    const double log_u = std::log(rng.uniform01());
    const bool accept = log_u < -coupling_ * delta;
    if (counter) {
      ++counter->proposed;
      if (accept) ++counter->accepted;
    }
    if (accept) x[site] = proposal;
    return accept;
  }

 private:
  void check_site(std::size_t site) const {
    if (site >= n_sites())
      throw argument_error("lattice_model: site index out of range");
  }
  void check_config(const config& x) const {
    if (x.size() != n_sites())
      throw argument_error("lattice_model: configuration size mismatch");
  }

  lattice_kind kind_;
  std::size_t side_;
  double coupling_;
  std::size_t n_colors_;
};

// Kernel functors compatible with run_chain (state = lattice_model::config).

// One systematic single-site Metropolis sweep over all sites.
struct lattice_metropolis_sweep {
  const lattice_model* model;
  accept_counter* counter = nullptr;

  lattice_model::config operator()(lattice_model::config x,
                                   rng_stream& rng) const {
    for (std::size_t s = 0; s < model->n_sites(); ++s)
      model->metropolis_site_update(x, s, rng, counter);
    return x;
  }
};

// One systematic heat-bath (Gibbs) sweep.
struct lattice_heat_bath_sweep {
  const lattice_model* model;

  lattice_model::config operator()(lattice_model::config x,
                                   rng_stream& rng) const {
    for (std::size_t s = 0; s < model->n_sites(); ++s)
      x[s] = model->full_conditional(x, s, rng);
    return x;
  }
};

// Mean spin for Ising; for Potts, the excess fraction of the modal color
// rescaled to [.. 1] as (q * max_frac - 1) / (q - 1).
inline double magnetization(const lattice_model& m,
                            const lattice_model::config& x) {
  if (x.size() != m.n_sites())
    throw argument_error("magnetization: configuration size mismatch");
  if (m.kind() == lattice_kind::ising) {
    double sum = 0.0;
    for (const auto s : x) sum += static_cast<double>(s);
    return sum / static_cast<double>(x.size());
  }
  std::vector<std::size_t> counts(m.states_per_site(), 0);
  for (const auto s : x) ++counts[m.value_index(s)];
  const double max_frac =
      static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
      static_cast<double>(x.size());
  const double q = static_cast<double>(m.states_per_site());
  return (q * max_frac - 1.0) / (q - 1.0);
}

inline double abs_magnetization(const lattice_model& m,
                                const lattice_model::config& x) {
  return std::abs(magnetization(m, x));
}

}  // namespace augmc
