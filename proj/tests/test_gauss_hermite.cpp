#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>

#include "augmc/errors.hpp"
#include "augmc/models/morris.hpp"
#include "augmc/oracle/quadrature.hpp"
#include "augmc/target.hpp"

namespace {

constexpr double kMorrisMeanA = 1.5009973516;

double hermite_moment(std::size_t k) {
  // integral of x^k exp(-x^2): Gamma((k+1)/2) for even k, zero for odd.
  if (k % 2 == 1) return 0.0;
  return std::tgamma(0.5 * static_cast<double>(k + 1));
}

}  // namespace

TEST_CASE("raw rule integrates polynomials up to degree 2n - 1") {
  const augmc::gauss_hermite_rule rule = augmc::make_gauss_hermite(5);
  REQUIRE(rule.nodes.size() == 5);
  REQUIRE(rule.weights.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    REQUIRE(rule.weights[i] > 0.0);
    // Eigenvalues come out sorted, so symmetry pairs first with last.
    REQUIRE(rule.nodes[i] == Catch::Approx(-rule.nodes[4 - i]).margin(1e-12));
  }

  for (std::size_t k = 0; k <= 9; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < 5; ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(k));
    REQUIRE(acc == Catch::Approx(hermite_moment(k)).margin(1e-10));
  }

  // Degree 10 is past the exactness bound and must visibly miss.
  double acc10 = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i)
    acc10 += rule.weights[i] * std::pow(rule.nodes[i], 10.0);
  REQUIRE(std::abs(acc10 - hermite_moment(10)) > 1e-6);
}

TEST_CASE("one-point rule is the weight mass at the origin") {
  const augmc::gauss_hermite_rule rule = augmc::make_gauss_hermite(1);
  REQUIRE(rule.nodes[0] == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(rule.weights[0] ==
          Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  REQUIRE_THROWS_AS(augmc::make_gauss_hermite(0), augmc::argument_error);
}

TEST_CASE("adaptation is a fixed point on Gaussian targets") {
  const augmc::target_density gauss(1, [](std::span<const double> x) {
    const double d = x[0] - 0.3;
    return -d * d / (2.0 * 0.49);
  });
  const augmc::gh_result r = augmc::gauss_hermite_moments(gauss, 9, 20);
  REQUIRE(r.converged);
  REQUIRE(r.iterations <= 10);
  REQUIRE(r.mean[0] == Catch::Approx(0.3).margin(1e-9));
  REQUIRE(r.cov(0, 0) == Catch::Approx(0.49).margin(1e-9));
}

TEST_CASE("bivariate Gaussian moments come out exact") {
  Eigen::MatrixXd prec(2, 2);
  prec << 2.0, -0.6, -0.6, 1.5;
  Eigen::VectorXd mu(2);
  mu << 0.4, -1.1;
  const augmc::target_density target(2, [&](std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), 2);
    const Eigen::VectorXd d = v - mu;
    return -0.5 * d.dot(prec * d);
  });
  const augmc::gh_result r = augmc::gauss_hermite_moments(target, 9, 30);
  REQUIRE(r.converged);
  const Eigen::MatrixXd cov = prec.inverse();
  REQUIRE((r.mean - mu).lpNorm<Eigen::Infinity>() < 1e-8);
  REQUIRE((r.cov - cov).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("log-transformed gamma posterior moments match closed forms") {
  // x ~ Gamma(5, 1) through u = log x; E[u] = digamma(5), E[e^u] = 5.
  const augmc::target_density target(1, [](std::span<const double> u) {
    return 5.0 * u[0] - std::exp(u[0]);
  });
  const augmc::gh_result r = augmc::gauss_hermite_moments(target, 20, 50);
  REQUIRE(r.converged);
  const double digamma5 =
      -0.57721566490153286 + 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
  REQUIRE(r.mean[0] == Catch::Approx(digamma5).margin(1e-5));

  const double mean_x = augmc::gh_expectation(
      target, [](std::span<const double> u) { return std::exp(u[0]); }, r, 20);
  REQUIRE(mean_x == Catch::Approx(5.0).margin(1e-4));
}

TEST_CASE("positive-support target works on the raw scale too") {
  const augmc::target_density target(1, [](std::span<const double> x) {
    if (x[0] <= 0.0) return -std::numeric_limits<double>::infinity();
    return 4.0 * std::log(x[0]) - x[0];
  });
  const augmc::gh_result r = augmc::gauss_hermite_moments(
      target, 20, 50, Eigen::VectorXd::Constant(1, 5.0),
      Eigen::MatrixXd::Constant(1, 1, 5.0));
  REQUIRE(r.mean[0] == Catch::Approx(5.0).margin(0.01));
  REQUIRE(r.cov(0, 0) == Catch::Approx(5.0).margin(0.05));
}

TEST_CASE("degree twenty pins the reference posterior mean to 1e-3") {
  const augmc::morris_model m = augmc::morris_reference_model();
  const augmc::target_density u_target(1, [&m](std::span<const double> u) {
    return m.log_marginal_a(std::exp(u[0])) + u[0];
  });
  const auto estimate = [&](std::size_t degree) {
    const augmc::gh_result r =
        augmc::gauss_hermite_moments(u_target, degree, 50);
    return augmc::gh_expectation(
        u_target, [](std::span<const double> u) { return std::exp(u[0]); }, r,
        degree);
  };
  const double at20 = estimate(20);
  const double at9 = estimate(9);
  REQUIRE(std::abs(at20 - kMorrisMeanA) / kMorrisMeanA < 1e-3);
  // Refining the rule must actually help.
  REQUIRE(std::abs(at20 - kMorrisMeanA) < std::abs(at9 - kMorrisMeanA));
}

TEST_CASE("adaptive rule argument handling") {
  const augmc::target_density gauss(1, [](std::span<const double> x) {
    return -0.5 * x[0] * x[0];
  });
  REQUIRE_THROWS_AS(augmc::gauss_hermite_moments(gauss, 2, 10),
                    augmc::argument_error);
  REQUIRE_THROWS_AS(augmc::gauss_hermite_moments(gauss, 9, 0),
                    augmc::argument_error);
  REQUIRE_THROWS_AS(
      augmc::gauss_hermite_moments(gauss, 9, 10,
                                   Eigen::VectorXd::Zero(2)),
      augmc::argument_error);

  const augmc::target_density wide(7, [](std::span<const double> x) {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return -0.5 * s;
  });
  REQUIRE_THROWS_AS(augmc::gauss_hermite_moments(wide, 9, 10),
                    augmc::argument_error);

  const augmc::gh_result ok = augmc::gauss_hermite_moments(gauss, 9, 10);
  REQUIRE_THROWS_AS(
      augmc::gh_expectation(
          gauss, [](std::span<const double> x) { return x[0]; }, ok, 2),
      augmc::argument_error);
}

TEST_CASE("pathological integrands are reported") {
  const augmc::target_density nothing(1, [](std::span<const double>) {
    return -std::numeric_limits<double>::infinity();
  });
  REQUIRE_THROWS_AS(augmc::gauss_hermite_moments(nothing, 9, 10),
                    augmc::numeric_error);

  const augmc::target_density blows_up(1, [](std::span<const double>) {
    return std::numeric_limits<double>::infinity();
  });
  REQUIRE_THROWS_WITH(augmc::gauss_hermite_moments(blows_up, 9, 10),
                      Catch::Matchers::ContainsSubstring("non-finite"));
}
