#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "augmc/models/lattice.hpp"
#include "augmc/rng.hpp"

using augmc::lattice_kind;
using augmc::lattice_model;
using augmc::rng_stream;

TEST_CASE("lattice invariants and validation") {
  REQUIRE_THROWS_AS(lattice_model(lattice_kind::ising, 0, 1.0),
                    augmc::domain_error);
  REQUIRE_THROWS_AS(lattice_model(lattice_kind::ising, 2, 1.0, 3),
                    augmc::domain_error);
  REQUIRE_THROWS_AS(lattice_model(lattice_kind::potts, 2, 1.0, 1),
                    augmc::domain_error);
  const lattice_model m(lattice_kind::ising, 4, 0.3);
  REQUIRE(m.n_sites() == 16);
  REQUIRE(m.edges().size() == 32);
  REQUIRE(m.value(0) == -1);
  REQUIRE(m.value(1) == +1);
  REQUIRE(m.value_index(m.value(0)) == 0);
  REQUIRE(m.value_index(m.value(1)) == 1);
}

TEST_CASE("neighbors wrap periodically") {
  const lattice_model m(lattice_kind::ising, 3, 1.0);
  // site 0 = (row 0, col 0): up (2,0)=6, down (1,0)=3, left (0,2)=2, right (0,1)=1
  const auto nb = m.neighbors(0);
  REQUIRE(nb[0] == 6);
  REQUIRE(nb[1] == 3);
  REQUIRE(nb[2] == 2);
  REQUIRE(nb[3] == 1);
  // site 8 = (2,2): up (1,2)=5, down (0,2)=2, left (2,1)=7, right (2,0)=6
  const auto nb8 = m.neighbors(8);
  REQUIRE(nb8[0] == 5);
  REQUIRE(nb8[1] == 2);
  REQUIRE(nb8[2] == 7);
  REQUIRE(nb8[3] == 6);
}

TEST_CASE("ground state energies match closed forms") {
  const lattice_model ising(lattice_kind::ising, 4, 1.0);
  REQUIRE(ising.energy(ising.constant_config(+1)) == -32.0);
  REQUIRE(ising.energy(ising.constant_config(-1)) == -32.0);
  const lattice_model potts(lattice_kind::potts, 4, 1.0, 3);
  REQUIRE(potts.energy(potts.constant_config(0)) == 0.0);
}

TEST_CASE("energy_delta agrees with full recomputation") {
  for (const std::size_t side : {2ul, 3ul, 4ul}) {
    const lattice_model ising(lattice_kind::ising, side, 0.7);
    const lattice_model potts(lattice_kind::potts, side, 0.7, 3);
    rng_stream rng(side, 0);
    auto x_i = ising.random_config(rng);
    auto x_p = potts.random_config(rng);
    for (int trial = 0; trial < 200; ++trial) {
      {
        const std::size_t site = rng.uniform_below(ising.n_sites());
        const auto flip = static_cast<lattice_model::spin_t>(-x_i[site]);
        const double delta = ising.energy_delta(x_i, site, flip);
        auto y = x_i;
        y[site] = flip;
        REQUIRE(std::abs((ising.energy(y) - ising.energy(x_i)) - delta) <
                1e-12);
        x_i = y;
      }
      {
        const std::size_t site = rng.uniform_below(potts.n_sites());
        const auto value =
            potts.value(rng.uniform_below(potts.states_per_site()));
        const double delta = potts.energy_delta(x_p, site, value);
        auto y = x_p;
        y[site] = value;
        REQUIRE(std::abs((potts.energy(y) - potts.energy(x_p)) - delta) <
                1e-12);
        x_p = y;
      }
    }
  }
}

TEST_CASE("a sweep of deltas tracks the energy to 1e-9") {
  const lattice_model m(lattice_kind::ising, 8, 0.44);
  rng_stream rng(3, 0);
  auto x = m.random_config(rng);
  double energy = m.energy(x);
  for (int sweep = 0; sweep < 20; ++sweep)
    for (std::size_t s = 0; s < m.n_sites(); ++s) {
      const auto flip = static_cast<lattice_model::spin_t>(-x[s]);
      if (rng.uniform01() < 0.5) continue;
      energy += m.energy_delta(x, s, flip);
      x[s] = flip;
    }
  REQUIRE(std::abs(energy - m.energy(x)) < 1e-9);
}

TEST_CASE("conditional probabilities are uniform at zero coupling") {
  const lattice_model m(lattice_kind::potts, 3, 0.0, 4);
  rng_stream rng(4, 0);
  const auto x = m.random_config(rng);
  const auto p = m.conditional_probs(x, 5);
  for (const double v : p) REQUIRE(v == Catch::Approx(0.25));
}

TEST_CASE("strong coupling pins the conditional to the neighbor value") {
  const lattice_model m(lattice_kind::ising, 3, 10.0);
  auto x = m.constant_config(+1);
  const auto p = m.conditional_probs(x, 4);
  REQUIRE(p[m.value_index(+1)] > 0.9999);
}

TEST_CASE("metropolis site update reaches the right marginals at coupling 0") {
  const lattice_model m(lattice_kind::potts, 2, 0.0, 3);
  rng_stream rng(5, 0);
  auto x = m.constant_config(0);
  std::vector<std::size_t> counts(3, 0);
  const std::size_t n = 90000;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < m.n_sites(); ++s)
      m.metropolis_site_update(x, s, rng);
    ++counts[m.value_index(x[0])];
  }
  for (const std::size_t c : counts)
    REQUIRE(std::abs(static_cast<double>(c) / n - 1.0 / 3.0) < 0.02);
}

TEST_CASE("magnetization conventions") {
  const lattice_model ising(lattice_kind::ising, 4, 1.0);
  REQUIRE(augmc::magnetization(ising, ising.constant_config(+1)) == 1.0);
  REQUIRE(augmc::magnetization(ising, ising.constant_config(-1)) == -1.0);
  REQUIRE(augmc::abs_magnetization(ising, ising.constant_config(-1)) == 1.0);
  const lattice_model potts(lattice_kind::potts, 2, 1.0, 4);
  REQUIRE(augmc::magnetization(potts, potts.constant_config(2)) == 1.0);
  lattice_model::config mixed{0, 1, 2, 3};
  REQUIRE(augmc::magnetization(potts, mixed) == 0.0);
}

TEST_CASE("full conditional draw respects strong coupling") {
  const lattice_model m(lattice_kind::ising, 3, 10.0);
  auto x = m.constant_config(+1);
  rng_stream rng(6, 0);
  for (int i = 0; i < 1000; ++i) REQUIRE(m.full_conditional(x, 4, rng) == 1);
}
