#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "augmc/estimators.hpp"
#include "augmc/rng.hpp"

using augmc::rng_stream;

namespace {

std::vector<double> ar1_series(double phi, std::size_t n, std::uint64_t seed) {
  rng_stream rng(seed, 0);
  std::vector<double> x(n);
  double cur = 0.0;
  const double innovation_sd = std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 0; i < n; ++i) {
    cur = phi * cur + innovation_sd * rng.normal();
    x[i] = cur;
  }
  return x;
}

std::vector<double> iid_series(std::size_t n, std::uint64_t seed) {
  rng_stream rng(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("acf of an AR(1) series decays geometrically") {
  const double phi = 0.9;
  const auto x = ar1_series(phi, 200000, 1);
  const auto rho = augmc::acf(x, 5);
  REQUIRE(rho[0] == 1.0);
  for (std::size_t k = 1; k <= 5; ++k)
    REQUIRE(std::abs(rho[k] - std::pow(phi, k)) < 0.05);
}

TEST_CASE("acf of white noise stays inside the sampling band") {
  const std::size_t n = 100000;
  const auto x = iid_series(n, 2);
  const auto rho = augmc::acf(x, 20);
  const double band = 4.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 1; k <= 20; ++k) REQUIRE(std::abs(rho[k]) < band);
}

TEST_CASE("acf rejects degenerate input") {
  const std::vector<double> flat(200, 3.0);
  REQUIRE_THROWS_AS(augmc::acf(flat, 10), augmc::argument_error);
  const std::vector<double> tiny{1.0, 2.0};
  REQUIRE_THROWS_AS(augmc::acf(tiny, 2), augmc::argument_error);
}

TEST_CASE("iact of near-independent samples is close to one") {
  const auto x = iid_series(100000, 3);
  const auto r = augmc::iact(x);
  REQUIRE(r.reliable);
  REQUIRE(std::abs(r.tau - 1.0) < 0.1);
  REQUIRE(std::abs(r.ess - static_cast<double>(x.size()) / r.tau) < 1e-9);
}

TEST_CASE("iact matches the AR(1) closed form") {
  const double phi = 0.9;  // tau = (1 + phi) / (1 - phi) = 19
  const auto x = ar1_series(phi, 400000, 4);
  const auto r = augmc::iact(x);
  REQUIRE(r.reliable);
  REQUIRE(std::abs(r.tau - 19.0) < 19.0 * 0.15);
}

TEST_CASE("duplicating every sample doubles the iact") {
  const auto x = iid_series(50000, 5);
  std::vector<double> doubled;
  doubled.reserve(2 * x.size());
  for (const double v : x) {
    doubled.push_back(v);
    doubled.push_back(v);
  }
  const double tau_x = augmc::iact(x).tau;
  const double tau_d = augmc::iact(doubled).tau;
  REQUIRE(std::abs(tau_d - 2.0 * tau_x) < 0.2);
}

TEST_CASE("alternating series yields iact below one") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.0 : -1.0;
  const auto r = augmc::iact(x);
  // rho(1) = -1 exactly: the window stops immediately with tau = 1 + 2 rho(1)
  REQUIRE(r.tau < 0.1);
}

TEST_CASE("iact flags an unreliable window") {
  // A series whose correlations never die out within n/2: a slow ramp.
  std::vector<double> x(200);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = static_cast<double>(i);
  const auto r = augmc::iact(x);
  REQUIRE_FALSE(r.reliable);
}

TEST_CASE("iact needs at least 100 samples") {
  const auto x = iid_series(99, 6);
  REQUIRE_THROWS_AS(augmc::iact(x), augmc::argument_error);
}

TEST_CASE("batch means standard error matches the iid formula") {
  const std::size_t n = 100000;
  const auto x = iid_series(n, 7);
  const double se = augmc::batch_means_se(x);
  const double expected = 1.0 / std::sqrt(static_cast<double>(n));
  REQUIRE(se > 0.6 * expected);
  REQUIRE(se < 1.6 * expected);
  REQUIRE_THROWS_AS(augmc::batch_means_se(iid_series(99, 8)),
                    augmc::argument_error);
}

TEST_CASE("morgan-pitman detects a variance reduction") {
  rng_stream rng(9, 0);
  const std::size_t n = 200;
  std::vector<double> wide(n), narrow(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double shared = rng.normal();
    wide[i] = shared + 0.7 * rng.normal();
    narrow[i] = 0.5 * shared;
  }
  const auto t = augmc::morgan_pitman(narrow, wide);
  REQUIRE(t.dof == n - 2);
  REQUIRE(t.t_stat < -2.3456);  // 1% one-sided critical value at dof 198

  // Exchangeable pairs should not reject.
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  REQUIRE(std::abs(augmc::morgan_pitman(a, b).t_stat) < 2.3456);
}

TEST_CASE("tv distance behaves like a metric on laws") {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const std::vector<double> q{0.5, 0.3, 0.2};
  REQUIRE(augmc::tv_distance(p, p) == 0.0);
  REQUIRE(augmc::tv_distance(p, q) == Catch::Approx(0.3));
  REQUIRE(augmc::tv_distance(p, q) == augmc::tv_distance(q, p));
  const std::vector<double> point_a{1.0, 0.0};
  const std::vector<double> point_b{0.0, 1.0};
  REQUIRE(augmc::tv_distance(point_a, point_b) == 1.0);
  REQUIRE_THROWS_AS(augmc::tv_distance(p, point_a), augmc::argument_error);
}

TEST_CASE("histogram normalizes counts and validates indices") {
  const std::vector<std::size_t> idx{0, 1, 1, 3};
  const auto h = augmc::histogram(idx, 4);
  REQUIRE(h == std::vector<double>{0.25, 0.5, 0.0, 0.25});
  const std::vector<std::size_t> bad{4};
  REQUIRE_THROWS_AS(augmc::histogram(bad, 4), augmc::argument_error);
}

TEST_CASE("rao-blackwell average applies the conditional expectation") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  const double rb = augmc::rao_blackwell_average(
      std::span<const double>(z), [](double v) { return 2.0 * v; });
  REQUIRE(rb == Catch::Approx(4.0));
}

TEST_CASE("sample variance uses the unbiased denominator") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  REQUIRE(augmc::sample_variance(x) == Catch::Approx(1.0));
}
