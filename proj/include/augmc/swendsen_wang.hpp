#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/models/lattice.hpp"
#include "augmc/rng.hpp"

namespace augmc {

// Auxiliary bond variables, one flag per entry of lattice_model::edges().
// Invariant: an active bond joins equal spins.
struct bond_configuration {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<bool> active;
};

// Activation probability for an equal-spin edge. The factor matches the
// energy conventions: E = -sum s_a s_b over {-1,+1} gives 1 - exp(-2b),
// E = sum [s_a != s_b] over colors gives 1 - exp(-b).
inline double bond_probability(const lattice_model& m) {
  if (m.coupling() < 0.0)
    throw domain_error("bond_probability: needs ferromagnetic coupling >= 0");
  const double factor = m.kind() == lattice_kind::ising ? 2.0 : 1.0;
  return 1.0 - std::exp(-factor * m.coupling());
}

// One uniform is consumed per equal-spin edge, none for unequal edges.
inline bond_configuration sample_bonds(const lattice_model& m,
                                       const lattice_model::config& x,
                                       rng_stream& rng) {
  const double p = bond_probability(m);
  bond_configuration bonds;
  bonds.edges = m.edges();
  bonds.active.assign(bonds.edges.size(), false);
  for (std::size_t e = 0; e < bonds.edges.size(); ++e) {
    const auto& [a, b] = bonds.edges[e];
    if (x[a] == x[b] && rng.uniform01() < p) bonds.active[e] = true;
  }
  return bonds;
}

// Union-find with path compression + union by size.
class union_find {
 public:
  explicit union_find(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Connected components under active bonds. label[site] is the smallest site
// index in its component, so the labeling does not depend on the order edges
// were processed; isolated sites label themselves.
inline std::vector<std::size_t> find_clusters(const bond_configuration& bonds,
                                              std::size_t n_sites) {
  union_find uf(n_sites);
  for (std::size_t e = 0; e < bonds.edges.size(); ++e)
    if (bonds.active[e]) uf.unite(bonds.edges[e].first, bonds.edges[e].second);
  std::vector<std::size_t> label(n_sites);
  std::vector<std::size_t> canonical(n_sites, n_sites);
  for (std::size_t s = 0; s < n_sites; ++s) {
    const std::size_t root = uf.find(s);
    if (canonical[root] == n_sites) canonical[root] = s;  // first visit = min
    label[s] = canonical[root];
  }
  return label;
}

// One collective move: bonds given spins, then independent uniform colors
// per cluster. Clusters are recolored in ascending label order (one color
// draw each), so a run is reproducible from the stream alone.
inline lattice_model::config sw_step(const lattice_model& m,
                                     lattice_model::config x,
                                     rng_stream& rng) {
  const bond_configuration bonds = sample_bonds(m, x, rng);
  const std::vector<std::size_t> label = find_clusters(bonds, m.n_sites());
  std::vector<lattice_model::spin_t> color(m.n_sites());
  for (std::size_t s = 0; s < m.n_sites(); ++s)
    if (label[s] == s)
      color[s] = m.value(rng.uniform_below(m.states_per_site()));
  for (std::size_t s = 0; s < m.n_sites(); ++s) x[s] = color[label[s]];
  return x;
}

// run_chain-compatible kernel wrapper.
struct sw_kernel {
  const lattice_model* model;

  lattice_model::config operator()(lattice_model::config x,
                                   rng_stream& rng) const {
    return sw_step(*model, std::move(x), rng);
  }
};

}  // namespace augmc
