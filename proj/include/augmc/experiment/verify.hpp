#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "augmc/augmentation.hpp"
#include "augmc/chain.hpp"
#include "augmc/models/lattice.hpp"
#include "augmc/models/morris.hpp"
#include "augmc/models/toys.hpp"
#include "augmc/oracle/exact.hpp"
#include "augmc/oracle/quadrature.hpp"
#include "augmc/rng.hpp"
#include "augmc/swendsen_wang.hpp"
#include "augmc/target.hpp"

namespace augmc::experiment {

// Built-in invariant suite behind the --verify flag: each check exercises an
// exactly-verifiable property of the samplers against an oracle.
inline int run_verify(std::ostream& out) {
  int failures = 0;
  const auto check = [&](const std::string& name,
                         const std::function<void()>& body) {
    try {
      body();
      out << "PASS: " << name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      out << "FAIL: " << name << ": " << e.what() << "\n";
    }
  };
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw error(what);
  };

  check("rng streams are reproducible and distinct", [&] {
    rng_stream a(1, 0), b(1, 0), c(1, 7);
    bool same = true, distinct = false;
    for (int i = 0; i < 64; ++i) {
      const double ua = a.uniform01();
      same = same && ua == b.uniform01();
      distinct = distinct || ua != c.uniform01();
    }
    require(same, "identical seeds disagree");
    require(distinct, "different streams coincide");
  });

  check("single-site metropolis leaves the 2x2 lattice law invariant", [&] {
    const lattice_model m(lattice_kind::ising, 2, 0.45);
    const exact_distribution<std::size_t> pi =
        enumerate_lattice(m);
    const Eigen::MatrixXd p = lattice_metropolis_random_site_matrix(m);
    const stationary_report rep = stationary_check(
        p, std::span<const double>(pi.probs));
    require(rep.stationarity_gap < 1e-10, "stationarity gap too large");
    require(rep.detailed_balance_gap < 1e-12, "detailed balance violated");
  });

  check("heat-bath scan leaves the 2x2 lattice law invariant", [&] {
    const lattice_model m(lattice_kind::ising, 2, 0.45);
    const exact_distribution<std::size_t> pi =
        enumerate_lattice(m);
    const Eigen::MatrixXd p = lattice_heat_bath_scan_matrix(m);
    const stationary_report rep = stationary_check(
        p, std::span<const double>(pi.probs));
    require(rep.stationarity_gap < 1e-10, "stationarity gap too large");
  });

  check("collective-move kernel leaves the 2x2 lattice law invariant", [&] {
    const lattice_model m(lattice_kind::ising, 2, 0.45);
    const exact_distribution<std::size_t> pi =
        enumerate_lattice(m);
    const Eigen::MatrixXd p = sw_matrix(m);
    const stationary_report rep = stationary_check(
        p, std::span<const double>(pi.probs));
    require(rep.stationarity_gap < 1e-10, "stationarity gap too large");
  });

  check("single-slot augmentation reproduces the two-component sampler", [&] {
    const gaussian_pair_model m(0.8);
    rng_stream r1(42, 0), r2(42, 0);
    population<double> pop;
    pop.values = {0.0};
    std::pair<double, double> state{0.0, 0.0};
    for (int it = 0; it < 10000; ++it) {
      pop = da_iterate(m, pop, selection_mode::with_replacement, r1);
      state = two_component_gibbs(m, state, r2);
      if (pop.values[0] != state.first)
        throw error("trajectories diverge at iteration " +
                    std::to_string(it));
    }
  });

  check("quadrature oracle reproduces the reference posterior moments", [&] {
    const morris_model m = morris_reference_model();
    const std::vector<double> grid = log_grid(1e-8, 1e12, 1024);
    const marginal_a_result r = quadrature_marginal_a(m, grid);
    require(std::abs(r.mean - 1.5009973516) < 1e-6,
            "posterior mean off: " + std::to_string(r.mean));
    require(std::abs(r.variance - 7.8988435015) < 5e-5,
            "posterior variance off: " + std::to_string(r.variance));
  });

  check("adaptive quadrature is exact on a Gaussian integrand", [&] {
    const target_density gauss(1, [](std::span<const double> x) {
      const double d = x[0] - 0.3;
      return -d * d / (2.0 * 0.49);
    });
    const gh_result r = gauss_hermite_moments(gauss, 9, 20);
    require(std::abs(r.mean[0] - 0.3) < 1e-10, "mean off");
    require(std::abs(r.cov(0, 0) - 0.49) < 1e-10, "variance off");
  });

  check("em iterations never decrease the objective", [&] {
    std::vector<double> xs;
    rng_stream gen(7, 0);
    for (int i = 0; i < 200; ++i) {
      const bool one = gen.uniform01() < 0.3;
      xs.push_back(one ? 2.0 + gen.normal() : -1.0 + gen.normal());
    }
    const mixture_weight_model m(
        xs,
        [](double x) { return -0.5 * (x + 1.0) * (x + 1.0); },
        [](double x) { return -0.5 * (x - 2.0) * (x - 2.0); });
    const em_result<double> r = em_fit(m, 0.5, 1e-10, 500);
    for (std::size_t i = 1; i < r.loglik_trace.size(); ++i)
      require(r.loglik_trace[i] >= r.loglik_trace[i - 1] - 1e-9,
              "objective decreased");
    require(r.converged, "did not converge");
  });

  check("selection with one dominant weight keeps only that draw", [&] {
    // Selection is without replacement, so ask for a single survivor: the
    // draw carrying e^30 of the weight must win the race.
    std::vector<double> draws{1.0, 2.0, 3.0, 4.0};
    std::vector<double> logw{0.0, 30.0, 0.0, 0.0};
    rng_stream rng(3, 0);
    const std::vector<double> kept = sir_resample(
        std::span<const double>(draws), std::span<const double>(logw), 1, rng);
    require(kept.size() == 1 && kept[0] == 2.0, "non-dominant draw selected");
  });

  return failures;
}

}  // namespace augmc::experiment
