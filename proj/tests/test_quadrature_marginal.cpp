#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "augmc/densities.hpp"
#include "augmc/errors.hpp"
#include "augmc/models/morris.hpp"
#include "augmc/oracle/quadrature.hpp"

TEST_CASE("log-spaced grid construction") {
  const std::vector<double> g = augmc::log_grid(1e-3, 1e3, 7);
  REQUIRE(g.size() == 7);
  REQUIRE(g.front() == Catch::Approx(1e-3).epsilon(1e-12));
  REQUIRE(g.back() == Catch::Approx(1e3).epsilon(1e-12));
  // Log-spacing means constant ratio between neighbours.
  for (std::size_t i = 1; i < g.size(); ++i)
    REQUIRE(g[i] / g[i - 1] == Catch::Approx(10.0).epsilon(1e-10));

  REQUIRE_THROWS_AS(augmc::log_grid(0.0, 1.0, 8), augmc::argument_error);
  REQUIRE_THROWS_AS(augmc::log_grid(2.0, 1.0, 8), augmc::argument_error);
  REQUIRE_THROWS_AS(augmc::log_grid(1.0, 2.0, 1), augmc::argument_error);
}

TEST_CASE("reference posterior moments are pinned") {
  const augmc::morris_model m = augmc::morris_reference_model();
  const std::vector<double> grid = augmc::log_grid(1e-8, 1e12, 1024);
  const augmc::marginal_a_result r = augmc::quadrature_marginal_a(m, grid);

  REQUIRE(r.mean == Catch::Approx(1.5009973516).margin(1e-6));
  REQUIRE(r.variance == Catch::Approx(7.8988435015).margin(5e-5));
  REQUIRE(r.variance ==
          Catch::Approx(r.second_moment - r.mean * r.mean).margin(1e-12));
}

TEST_CASE("refined law is a proper distribution over a sorted grid") {
  const augmc::morris_model m = augmc::morris_reference_model();
  const std::vector<double> grid = augmc::log_grid(1e-8, 1e12, 256);
  const augmc::marginal_a_result r = augmc::quadrature_marginal_a(m, grid);

  REQUIRE(r.grid.size() > grid.size());  // refinement actually subdivided
  double total = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    if (i) REQUIRE(r.grid[i] > r.grid[i - 1]);
    REQUIRE(r.probs[i] >= 0.0);
    total += r.probs[i];
  }
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));

  // Moments recomputed from the discrete law agree with the reported ones.
  double m1 = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i) m1 += r.grid[i] * r.probs[i];
  REQUIRE(m1 == Catch::Approx(r.mean).epsilon(1e-6));
}

TEST_CASE("generic overload handles a pure prior with known moments") {
  // numerator / chi_square(5): mean 1/3, variance 2/9.
  const std::vector<double> grid = augmc::log_grid(1e-8, 1e12, 1024);
  const augmc::marginal_a_result r = augmc::quadrature_marginal_a(
      [](double a) {
        return augmc::log_scaled_inv_chi_square_pdf(a, 5.0, 1.0);
      },
      grid);
  REQUIRE(r.mean == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
  REQUIRE(r.variance == Catch::Approx(2.0 / 9.0).epsilon(1e-5));
}

TEST_CASE("flat data pulls the posterior mean of A down") {
  const augmc::morris_model reference = augmc::morris_reference_model();
  const augmc::morris_model flat(Eigen::VectorXd::Zero(4),
                                 Eigen::VectorXd::Ones(4), 1.0, 1.0);
  const std::vector<double> grid = augmc::log_grid(1e-8, 1e12, 1024);
  const double mean_ref = augmc::quadrature_marginal_a(reference, grid).mean;
  const double mean_flat = augmc::quadrature_marginal_a(flat, grid).mean;
  REQUIRE(mean_flat < mean_ref);
}

TEST_CASE("grid validation") {
  const augmc::morris_model m = augmc::morris_reference_model();

  const std::vector<double> too_few{1.0, 2.0, 3.0};
  REQUIRE_THROWS_AS(augmc::quadrature_marginal_a(m, too_few),
                    augmc::argument_error);

  std::vector<double> nonpositive = augmc::log_grid(1e-8, 1e2, 64);
  nonpositive.front() = -1.0;
  REQUIRE_THROWS_AS(augmc::quadrature_marginal_a(m, nonpositive),
                    augmc::argument_error);

  // A sliver of the support misses posterior mass at both ends.
  const std::vector<double> sliver = augmc::log_grid(1e-3, 1e-2, 64);
  REQUIRE_THROWS_WITH(augmc::quadrature_marginal_a(m, sliver),
                      Catch::Matchers::ContainsSubstring("cover"));

  const std::vector<double> grid = augmc::log_grid(1e-8, 1e12, 64);
  REQUIRE_THROWS_AS(
      augmc::quadrature_marginal_a(
          [](double) { return -std::numeric_limits<double>::infinity(); },
          grid),
      augmc::argument_error);
}
