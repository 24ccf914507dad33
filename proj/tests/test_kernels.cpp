#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "augmc/kernels.hpp"
#include "augmc/models/lattice.hpp"
#include "augmc/rng.hpp"

using augmc::accept_counter;
using augmc::rng_stream;

namespace {

// Two-point target on {0.0, 1.0} with pi = (2/3, 1/3); the proposal is the
// deterministic flip, so acceptance 0->1 is 1/2 and 1->0 is 1.
double two_point_log_target(const double& x) {
  return x < 0.5 ? std::log(2.0 / 3.0) : std::log(1.0 / 3.0);
}

double flip(const double& x, rng_stream&) { return x < 0.5 ? 1.0 : 0.0; }

}  // namespace

TEST_CASE("metropolis converges to a two-point law") {
  rng_stream rng(1, 0);
  double x = 0.0;
  accept_counter counter;
  std::size_t at_zero = 0;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    x = augmc::metropolis_step(two_point_log_target, x, flip, rng, &counter);
    if (x < 0.5) ++at_zero;
  }
  REQUIRE(std::abs(static_cast<double>(at_zero) / n - 2.0 / 3.0) < 0.01);
  // pi0 * 1/2 + pi1 * 1 = 2/3 accepted moves on average
  REQUIRE(std::abs(counter.rate() - 2.0 / 3.0) < 0.01);
}

TEST_CASE("metropolis consumes exactly one uniform per step") {
  rng_stream a(9, 0), b(9, 0);
  double x = 0.0;
  for (int i = 0; i < 1000; ++i) {
    x = augmc::metropolis_step(two_point_log_target, x, flip, a);
    b.uniform01();
  }
  REQUIRE(a.uniform01() == b.uniform01());
}

TEST_CASE("proposals outside the support are always rejected") {
  const auto log_target = [](const double& x) {
    return x >= 0.0 ? -x : -std::numeric_limits<double>::infinity();
  };
  const auto negate = [](const double& x, rng_stream&) { return -x - 1.0; };
  rng_stream rng(2, 0);
  accept_counter counter;
  double x = 1.0;
  for (int i = 0; i < 1000; ++i)
    x = augmc::metropolis_step(log_target, x, negate, rng, &counter);
  REQUIRE(x == 1.0);
  REQUIRE(counter.accepted == 0);
}

TEST_CASE("cached log target is honored and refreshed") {
  std::size_t evals = 0;
  const auto log_target = [&evals](const double& x) {
    ++evals;
    return -0.5 * x * x;
  };
  rng_stream rng(3, 0);
  double cache = std::numeric_limits<double>::quiet_NaN();
  double x = 0.3;
  x = augmc::metropolis_step(log_target, x, flip, rng, nullptr, &cache);
  const std::size_t first_pass = evals;   // current + proposed
  REQUIRE(first_pass == 2);
  x = augmc::metropolis_step(log_target, x, flip, rng, nullptr, &cache);
  REQUIRE(evals == first_pass + 1);       // cache supplies the current value
  REQUIRE(cache == -0.5 * x * x);
}

TEST_CASE("single-site scan acceptance falls as the step grows") {
  const auto log_target = [](const std::vector<double>& x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return -0.5 * s;
  };
  const std::size_t d = 3;
  double rate_small = 0.0, rate_large = 0.0;
  for (const double step : {0.2, 5.0}) {
    rng_stream rng(4, 0);
    std::vector<double> x(d, 0.0);
    std::vector<double> steps(d, step);
    std::vector<accept_counter> counters(d);
    for (int sweep = 0; sweep < 20000; ++sweep)
      x = augmc::single_site_scan(log_target, std::move(x), steps, rng,
                                  counters);
    double total = 0.0;
    for (const auto& c : counters) total += c.rate();
    (step < 1.0 ? rate_small : rate_large) = total / d;
  }
  REQUIRE(rate_small > rate_large + 0.2);
}

TEST_CASE("single-site scan validates its inputs") {
  const auto log_target = [](const std::vector<double>&) { return 0.0; };
  rng_stream rng(5, 0);
  std::vector<double> steps{0.1};
  REQUIRE_THROWS_AS(
      augmc::single_site_scan(log_target, std::vector<double>{}, steps, rng),
      augmc::argument_error);
  REQUIRE_THROWS_AS(augmc::single_site_scan(
                        log_target, std::vector<double>{0.0, 0.0}, steps, rng),
                    augmc::argument_error);
}

TEST_CASE("gibbs scan matches the bivariate normal law") {
  const double rho = 0.9;
  augmc::full_conditional_set conditionals;
  conditionals.samplers.push_back(
      [rho](std::span<const double> x, rng_stream& r) {
        return r.normal(rho * x[1], std::sqrt(1.0 - rho * rho));
      });
  conditionals.samplers.push_back(
      [rho](std::span<const double> x, rng_stream& r) {
        return r.normal(rho * x[0], std::sqrt(1.0 - rho * rho));
      });
  for (const auto order : {augmc::scan_order::systematic,
                           augmc::scan_order::random_permutation}) {
    rng_stream rng(6, 0);
    std::vector<double> x{0.0, 0.0};
    double s0 = 0.0, s00 = 0.0, s01 = 0.0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
      x = augmc::gibbs_scan(conditionals, std::move(x), order, rng);
      s0 += x[0];
      s00 += x[0] * x[0];
      s01 += x[0] * x[1];
    }
    REQUIRE(std::abs(s0 / n) < 0.05);
    REQUIRE(std::abs(s00 / n - 1.0) < 0.05);
    REQUIRE(std::abs(s01 / n - rho) < 0.05);
  }
}

TEST_CASE("gibbs scan reports the failing component") {
  augmc::full_conditional_set conditionals;
  conditionals.samplers.push_back(
      [](std::span<const double>, rng_stream&) { return 0.0; });
  conditionals.samplers.push_back(
      [](std::span<const double>, rng_stream&) -> double {
        throw augmc::domain_error("boom");
      });
  rng_stream rng(7, 0);
  std::vector<double> x{0.0, 0.0};
  REQUIRE_THROWS_WITH(
      augmc::gibbs_scan(conditionals, x, augmc::scan_order::systematic, rng),
      Catch::Matchers::ContainsSubstring("component 1"));
}

TEST_CASE("annealing finds the lattice ground state") {
  const augmc::lattice_model m(augmc::lattice_kind::ising, 4, 1.0);
  const auto energy = [&m](const augmc::lattice_model::config& x) {
    return m.energy(x);
  };
  const auto propose = [&m](augmc::lattice_model::config x, rng_stream& r) {
    const std::size_t site = r.uniform_below(m.n_sites());
    x[site] = static_cast<augmc::lattice_model::spin_t>(-x[site]);
    return x;
  };
  std::vector<double> schedule;
  for (int level = 0; level < 60; ++level) {
    const double temp = 3.0 * std::pow(0.9, level);
    for (int rep = 0; rep < 40; ++rep) schedule.push_back(temp);
  }
  const double ground = -2.0 * static_cast<double>(m.n_sites());
  std::size_t hits = 0;
  for (std::uint64_t restart = 0; restart < 100; ++restart) {
    rng_stream rng(restart + 1, 42);
    auto x0 = m.random_config(rng);
    const auto result = augmc::anneal(energy, schedule, x0, propose, rng);
    if (result.best_energy == ground) ++hits;
    REQUIRE(result.energy_trace.size() == schedule.size() + 1);
    REQUIRE(result.best_energy <= result.energy_trace.back());
  }
  REQUIRE(hits >= 95);
}

TEST_CASE("annealing rejects bad schedules") {
  const auto energy = [](const double& x) { return x * x; };
  const auto propose = [](const double& x, rng_stream& r) {
    return x + r.normal();
  };
  rng_stream rng(1, 0);
  const std::vector<double> rising{1.0, 2.0};
  const std::vector<double> nonpositive{1.0, 0.0};
  REQUIRE_THROWS_AS(augmc::anneal(energy, rising, 0.0, propose, rng),
                    augmc::argument_error);
  REQUIRE_THROWS_AS(augmc::anneal(energy, nonpositive, 0.0, propose, rng),
                    augmc::argument_error);
  REQUIRE_THROWS_AS(
      augmc::anneal(energy, std::vector<double>{}, 0.0, propose, rng),
      augmc::argument_error);
}
