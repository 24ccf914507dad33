#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/models/lattice.hpp"
#include "augmc/swendsen_wang.hpp"

namespace augmc {

template <class State>
struct exact_distribution {
  std::vector<State> states;
  std::vector<double> probs;
};

inline constexpr std::size_t enumerate_capacity = std::size_t{1} << 20;
inline constexpr std::size_t dense_matrix_capacity = 4096;

// Exact law over 0..n_states-1 from unnormalized log weights.
inline exact_distribution<std::size_t> enumerate_discrete(
    std::size_t n_states, const std::function<double(std::size_t)>& log_weight) {
  if (n_states == 0) throw argument_error("enumerate_discrete: empty space");
  if (n_states > enumerate_capacity)
    throw capacity_error("enumerate_discrete: state space exceeds 2^20");
  exact_distribution<std::size_t> dist;
  dist.states.resize(n_states);
  dist.probs.resize(n_states);
  std::vector<double> logw(n_states);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_states; ++i) {
    dist.states[i] = i;
    logw[i] = log_weight(i);
    max_logw = std::max(max_logw, logw[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n_states; ++i) {
    dist.probs[i] = std::exp(logw[i] - max_logw);
    z += dist.probs[i];
  }
  for (double& p : dist.probs) p /= z;
  return dist;
}

// Mixed-radix state indexing for lattice configurations: site 0 is the most
// significant digit, digit = value index, base = states per site.
inline std::size_t lattice_state_count(const lattice_model& m) {
  std::size_t n = 1;
  for (std::size_t s = 0; s < m.n_sites(); ++s) {
    if (n > enumerate_capacity / m.states_per_site() + 1)
      throw capacity_error("lattice enumeration: state space exceeds 2^20");
    n *= m.states_per_site();
  }
  return n;
}

inline std::size_t lattice_index(const lattice_model& m,
                                 const lattice_model::config& x) {
  std::size_t idx = 0;
  for (std::size_t s = 0; s < m.n_sites(); ++s)
    idx = idx * m.states_per_site() + m.value_index(x[s]);
  return idx;
}

inline lattice_model::config lattice_config(const lattice_model& m,
                                            std::size_t idx) {
  lattice_model::config x(m.n_sites());
  for (std::size_t s = m.n_sites(); s-- > 0;) {
    x[s] = m.value(idx % m.states_per_site());
    idx /= m.states_per_site();
  }
  return x;
}

// Boltzmann law over all lattice configurations (index order).
inline exact_distribution<std::size_t> enumerate_lattice(
    const lattice_model& m) {
  const std::size_t n = lattice_state_count(m);
  if (n > enumerate_capacity)
    throw capacity_error("enumerate_lattice: state space exceeds 2^20");
  return enumerate_discrete(n, [&m](std::size_t i) {
    return -m.coupling() * m.energy(lattice_config(m, i));
  });
}

struct stationary_report {
  double stationarity_gap = 0.0;      // max-norm of pi^T P - pi^T
  double detailed_balance_gap = 0.0;  // max |pi_i P_ij - pi_j P_ji|
};

// Exhaustive check of a dense transition matrix against a target law.
inline stationary_report stationary_check(const Eigen::MatrixXd& P,
                                          std::span<const double> pi) {
  const auto n = static_cast<std::size_t>(P.rows());
  if (n == 0 || static_cast<std::size_t>(P.cols()) != n)
    throw argument_error("stationary_check: P must be square and nonempty");
  if (pi.size() != n)
    throw argument_error("stationary_check: target size mismatch");
  if (n > dense_matrix_capacity)
    throw capacity_error("stationary_check: more than 4096 states");
  for (std::size_t i = 0; i < n; ++i) {
    const double row_sum = P.row(static_cast<Eigen::Index>(i)).sum();
    if (std::abs(row_sum - 1.0) > 1e-9)
      throw numeric_error("stationary_check: kernel row does not sum to 1");
  }
  stationary_report report;
  for (std::size_t j = 0; j < n; ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      flow += pi[i] * P(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j));
    report.stationarity_gap =
        std::max(report.stationarity_gap, std::abs(flow - pi[j]));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      report.detailed_balance_gap =
          std::max(report.detailed_balance_gap,
                   std::abs(pi[i] * P(ei, ej) - pi[j] * P(ej, ei)));
    }
  return report;
}

namespace detail {

inline Eigen::MatrixXd identity_matrix(std::size_t n) {
  return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(n));
}

inline void check_matrix_capacity(std::size_t n) {
  if (n > dense_matrix_capacity)
    throw capacity_error("lattice kernel matrix: more than 4096 states");
}

}  // namespace detail

// Exact transition matrix of the single-site Metropolis update at one site:
// propose the flip (or a uniformly random other color), accept with
// probability min(1, exp(-coupling * delta E)).
inline Eigen::MatrixXd lattice_metropolis_site_matrix(const lattice_model& m,
                                                      std::size_t site) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  const double n_proposals = static_cast<double>(m.states_per_site() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const lattice_model::config x = lattice_config(m, i);
    double stay = 0.0;
    for (std::size_t v = 0; v < m.states_per_site(); ++v) {
      const lattice_model::spin_t s = m.value(v);
      if (s == x[site]) continue;
      const double delta = m.energy_delta(x, site, s);
      const double accept = std::min(1.0, std::exp(-m.coupling() * delta));
      lattice_model::config y = x;
      y[site] = s;
      const std::size_t j = lattice_index(m, y);
      const double move = accept / n_proposals;
      P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += move;
      stay += (1.0 - accept) / n_proposals;
    }
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += stay;
  }
  return P;
}

// Uniform random-site mixture (reversible single-site Metropolis kernel).
inline Eigen::MatrixXd lattice_metropolis_random_site_matrix(
    const lattice_model& m) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < m.n_sites(); ++s)
    P += lattice_metropolis_site_matrix(m, s);
  return P / static_cast<double>(m.n_sites());
}

// Systematic sweep = ordered product of the per-site matrices.
inline Eigen::MatrixXd lattice_metropolis_sweep_matrix(const lattice_model& m) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  Eigen::MatrixXd P = detail::identity_matrix(n);
  for (std::size_t s = 0; s < m.n_sites(); ++s)
    P = P * lattice_metropolis_site_matrix(m, s);
  return P;
}

// Heat-bath site kernel from the same conditional the sampler draws from.
inline Eigen::MatrixXd lattice_heat_bath_site_matrix(const lattice_model& m,
                                                     std::size_t site) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const lattice_model::config x = lattice_config(m, i);
    const std::vector<double> probs = m.conditional_probs(x, site);
    for (std::size_t v = 0; v < m.states_per_site(); ++v) {
      lattice_model::config y = x;
      y[site] = m.value(v);
      const std::size_t j = lattice_index(m, y);
      P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += probs[v];
    }
  }
  return P;
}

inline Eigen::MatrixXd lattice_heat_bath_scan_matrix(const lattice_model& m) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  Eigen::MatrixXd P = detail::identity_matrix(n);
  for (std::size_t s = 0; s < m.n_sites(); ++s)
    P = P * lattice_heat_bath_site_matrix(m, s);
  return P;
}

// Exact collective-move matrix: sum over all bond subsets of equal-spin
// edges, each recoloring its clusters uniformly. Exponential in the edge
// count, so only tiny lattices are admissible.
inline Eigen::MatrixXd sw_matrix(const lattice_model& m) {
  const std::size_t n = lattice_state_count(m);
  detail::check_matrix_capacity(n);
  const auto edges = m.edges();
  if (edges.size() > 20)
    throw capacity_error("sw_matrix: too many edges to enumerate bonds");
  const double p = bond_probability(m);
  const double q = static_cast<double>(m.states_per_site());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const lattice_model::config x = lattice_config(m, i);
    std::vector<std::size_t> eligible;  // equal-spin edges may carry a bond
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (x[edges[e].first] == x[edges[e].second]) eligible.push_back(e);
    for (std::size_t mask = 0; mask < (std::size_t{1} << eligible.size());
         ++mask) {
      bond_configuration bonds;
      bonds.edges = edges;
      bonds.active.assign(edges.size(), false);
      double bond_prob = 1.0;
      for (std::size_t b = 0; b < eligible.size(); ++b) {
        if (mask >> b & 1) {
          bonds.active[eligible[b]] = true;
          bond_prob *= p;
        } else {
          bond_prob *= 1.0 - p;
        }
      }
      if (bond_prob == 0.0) continue;
      const std::vector<std::size_t> label = find_clusters(bonds, m.n_sites());
      std::size_t n_clusters = 0;
      for (std::size_t s = 0; s < m.n_sites(); ++s)
        if (label[s] == s) ++n_clusters;
      const double color_prob = std::pow(q, -static_cast<double>(n_clusters));
      // Enumerate target states consistent with the clustering.
      for (std::size_t j = 0; j < n; ++j) {
        const lattice_model::config y = lattice_config(m, j);
        bool consistent = true;
        for (std::size_t s = 0; s < m.n_sites() && consistent; ++s)
          if (y[s] != y[label[s]]) consistent = false;
        if (consistent)
          P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              bond_prob * color_prob;
      }
    }
  }
  return P;
}

}  // namespace augmc
