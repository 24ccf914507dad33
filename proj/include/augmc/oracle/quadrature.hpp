#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/models/morris.hpp"
#include "augmc/target.hpp"

namespace augmc {

// 1-D Gauss-Hermite rule for the weight exp(-x^2), built from the Jacobi
// matrix (Golub-Welsch): nodes are its eigenvalues, weights sqrt(pi) times
// the squared first eigenvector components.
struct gauss_hermite_rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

inline gauss_hermite_rule make_gauss_hermite(std::size_t degree) {
  if (degree < 1) throw argument_error("make_gauss_hermite: degree must be >= 1");
  const auto n = static_cast<Eigen::Index>(degree);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw numeric_error("make_gauss_hermite: eigensolver failed");
  gauss_hermite_rule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = sqrt_pi * v0 * v0;
  }
  return rule;
}

struct gh_result {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd center;    // final adaptation point
  Eigen::MatrixXd scale_l;   // Cholesky factor of the final covariance
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

// Odometer over the product rule; calls visit(point, log_weight_adjusted)
// where the adjustment e^{|x|^2} w_alpha converts the Hermite weight into a
// plain integration weight against Lebesgue measure (up to a constant).
template <class Visit>
void gh_product_visit(const gauss_hermite_rule& rule, const Eigen::VectorXd& center,
                      const Eigen::MatrixXd& scale_l, Visit&& visit) {
  const std::size_t dim = static_cast<std::size_t>(center.size());
  const std::size_t deg = static_cast<std::size_t>(rule.nodes.size());
  std::vector<std::size_t> idx(dim, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  for (;;) {
    double log_w = 0.0;
    double norm2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double node = rule.nodes[static_cast<Eigen::Index>(idx[d])];
      x[static_cast<Eigen::Index>(d)] = node;
      log_w += std::log(rule.weights[static_cast<Eigen::Index>(idx[d])]);
      norm2 += node * node;
    }
    const Eigen::VectorXd point =
        center + std::numbers::sqrt2 * (scale_l * x);
    visit(point, log_w + norm2);
    std::size_t d = 0;
    for (; d < dim; ++d) {
      if (++idx[d] < deg) break;
      idx[d] = 0;
    }
    if (d == dim) break;
  }
}

inline std::string point_to_string(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i)
    os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace detail

// Adaptive Gauss-Hermite posterior moments: center and scale the product
// rule by the previous iteration's (mean, covariance), recompute, repeat
// until the moments stop moving (relative 1e-8) or adapt_iters is reached.
inline gh_result gauss_hermite_moments(
    const target_density& target, std::size_t degree, std::size_t adapt_iters,
    Eigen::VectorXd init_mean = Eigen::VectorXd(),
    Eigen::MatrixXd init_cov = Eigen::MatrixXd()) {
  const std::size_t dim = target.dimension();
  if (dim < 1 || dim > 6)
    throw argument_error("gauss_hermite_moments: dimension must be 1..6");
  if (degree < 3)
    throw argument_error("gauss_hermite_moments: degree must be >= 3");
  if (adapt_iters < 1)
    throw argument_error("gauss_hermite_moments: adapt_iters must be >= 1");
  const auto edim = static_cast<Eigen::Index>(dim);
  if (init_mean.size() == 0) init_mean = Eigen::VectorXd::Zero(edim);
  if (init_cov.size() == 0)
    init_cov = Eigen::MatrixXd::Identity(edim, edim);
  if (init_mean.size() != edim || init_cov.rows() != edim ||
      init_cov.cols() != edim)
    throw argument_error("gauss_hermite_moments: bad init dimensions");

  const gauss_hermite_rule rule = make_gauss_hermite(degree);
  gh_result result;
  Eigen::VectorXd mean = init_mean;
  Eigen::MatrixXd cov = init_cov;

  for (std::size_t iter = 0; iter < adapt_iters; ++iter) {
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw numeric_error(
          "gauss_hermite_moments: covariance not positive definite");
    const Eigen::MatrixXd scale_l = llt.matrixL();

    // First pass: collect log-integrand values for stable normalization.
    std::vector<Eigen::VectorXd> points;
    std::vector<double> logs;
    double max_log = -std::numeric_limits<double>::infinity();
    detail::gh_product_visit(
        rule, mean, scale_l,
        [&](const Eigen::VectorXd& p, double log_w) {
          const double lt = target(std::span<const double>(
              p.data(), static_cast<std::size_t>(p.size())));
          if (std::isnan(lt) || lt == std::numeric_limits<double>::infinity())
            throw numeric_error(
                "gauss_hermite_moments: non-finite integrand at node " +
                detail::point_to_string(p));
          points.push_back(p);
          logs.push_back(lt + log_w);
          max_log = std::max(max_log, logs.back());
        });
    if (!std::isfinite(max_log))
      throw numeric_error("gauss_hermite_moments: zero mass under the rule");

    double z = 0.0;
    Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(edim);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double w = std::exp(logs[i] - max_log);
      z += w;
      new_mean += w * points[i];
    }
    new_mean /= z;
    Eigen::MatrixXd new_cov = Eigen::MatrixXd::Zero(edim, edim);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double w = std::exp(logs[i] - max_log);
      const Eigen::VectorXd d = points[i] - new_mean;
      new_cov += w * (d * d.transpose());
    }
    new_cov /= z;

    double change = 0.0;
    for (Eigen::Index i = 0; i < edim; ++i)
      change = std::max(change, std::abs(new_mean[i] - mean[i]) /
                                    (1.0 + std::abs(new_mean[i])));
    for (Eigen::Index i = 0; i < edim; ++i)
      for (Eigen::Index j = 0; j < edim; ++j)
        change = std::max(change, std::abs(new_cov(i, j) - cov(i, j)) /
                                      (1.0 + std::abs(new_cov(i, j))));
    mean = new_mean;
    cov = new_cov;
    result.iterations = iter + 1;
    result.center = mean;
    result.scale_l = scale_l;
    if (change < 1e-8) {
      result.converged = true;
      break;
    }
  }
  result.mean = mean;
  result.cov = cov;
  // Final adaptation point for follow-up expectations.
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    result.center = mean;
    result.scale_l = llt.matrixL();
  }
  return result;
}

// Posterior expectation of h under the target, using the rule adapted by a
// previous gauss_hermite_moments run.
inline double gh_expectation(
    const target_density& target,
    const std::function<double(std::span<const double>)>& h,
    const gh_result& adapted, std::size_t degree) {
  if (degree < 3) throw argument_error("gh_expectation: degree must be >= 3");
  const gauss_hermite_rule rule = make_gauss_hermite(degree);
  std::vector<double> logs;
  std::vector<double> h_values;
  double max_log = -std::numeric_limits<double>::infinity();
  detail::gh_product_visit(
      rule, adapted.center, adapted.scale_l,
      [&](const Eigen::VectorXd& p, double log_w) {
        const std::span<const double> view(
            p.data(), static_cast<std::size_t>(p.size()));
        const double lt = target(view);
        if (std::isnan(lt) || lt == std::numeric_limits<double>::infinity())
          throw numeric_error("gh_expectation: non-finite integrand at node " +
                              detail::point_to_string(p));
        logs.push_back(lt + log_w);
        h_values.push_back(h(view));
        max_log = std::max(max_log, logs.back());
      });
  if (!std::isfinite(max_log))
    throw numeric_error("gh_expectation: zero mass under the rule");
  double z = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double w = std::exp(logs[i] - max_log);
    z += w;
    acc += w * h_values[i];
  }
  return acc / z;
}

// Normalized 1-D law on a positive grid by trapezoid integration of an
// unnormalized log-density, with geometric-midpoint refinement until the
// first two moments stabilize.
struct marginal_a_result {
  std::vector<double> grid;   // refined node locations
  std::vector<double> probs;  // per-node masses, summing to 1
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

inline marginal_a_result quadrature_marginal_a(
    const std::function<double(double)>& log_density,
    std::span<const double> grid) {
  std::vector<double> nodes(grid.begin(), grid.end());
  std::sort(nodes.begin(), nodes.end());
  if (nodes.size() < 8)
    throw argument_error("quadrature_marginal_a: grid needs >= 8 points");
  if (nodes.front() <= 0.0)
    throw argument_error("quadrature_marginal_a: grid must be positive");

  auto evaluate = [&](const std::vector<double>& a) {
    std::vector<double> logf(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) logf[i] = log_density(a[i]);
    return logf;
  };

  std::vector<double> logf = evaluate(nodes);
  const double peak = *std::max_element(logf.begin(), logf.end());
  if (!std::isfinite(peak))
    throw argument_error("quadrature_marginal_a: density vanishes on grid");
  // Coverage: endpoint density must be negligible against the peak.
  const double edge_tol = std::log(1e-8);
  if (logf.front() - peak > edge_tol || logf.back() - peak > edge_tol)
    throw argument_error(
        "quadrature_marginal_a: grid does not cover the posterior mass");

  auto moments = [&](const std::vector<double>& a,
                     const std::vector<double>& lf) {
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      const double h = a[i + 1] - a[i];
      const double f0 = std::exp(lf[i] - peak);
      const double f1 = std::exp(lf[i + 1] - peak);
      z += 0.5 * h * (f0 + f1);
      m1 += 0.5 * h * (a[i] * f0 + a[i + 1] * f1);
      m2 += 0.5 * h * (a[i] * a[i] * f0 + a[i + 1] * a[i + 1] * f1);
    }
    if (z <= 0.0)
      throw numeric_error("quadrature_marginal_a: zero integrated mass");
    return std::array<double, 2>{m1 / z, m2 / z};
  };

  std::array<double, 2> current = moments(nodes, logf);
  bool stable = false;
  for (int pass = 0; pass < 20 && !stable; ++pass) {
    if (nodes.size() > (std::size_t{1} << 21))
      throw numeric_error("quadrature_marginal_a: refinement diverged");
    std::vector<double> refined;
    refined.reserve(2 * nodes.size());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      refined.push_back(nodes[i]);
      refined.push_back(std::sqrt(nodes[i] * nodes[i + 1]));
    }
    refined.push_back(nodes.back());
    std::vector<double> refined_logf = evaluate(refined);
    const std::array<double, 2> next = moments(refined, refined_logf);
    stable = std::abs(next[0] - current[0]) <= 1e-8 * std::abs(next[0]) &&
             std::abs(next[1] - current[1]) <= 1e-8 * std::abs(next[1]);
    nodes = std::move(refined);
    logf = std::move(refined_logf);
    current = next;
  }
  if (!stable)
    throw numeric_error("quadrature_marginal_a: moments failed to stabilize");

  marginal_a_result result;
  result.mean = current[0];
  result.second_moment = current[1];
  result.variance = current[1] - current[0] * current[0];
  // Node masses: half of each adjacent trapezoid cell.
  result.grid = nodes;
  result.probs.assign(nodes.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    const double c0 = 0.5 * h * std::exp(logf[i] - peak);
    const double c1 = 0.5 * h * std::exp(logf[i + 1] - peak);
    result.probs[i] += c0;
    result.probs[i + 1] += c1;
    z += c0 + c1;
  }
  for (double& p : result.probs) p /= z;
  return result;
}

inline marginal_a_result quadrature_marginal_a(const morris_model& m,
                                               std::span<const double> grid) {
  return quadrature_marginal_a(
      [&m](double a) { return m.log_marginal_a(a); }, grid);
}

// Log-spaced grid helper for positive supports.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo)) throw argument_error("log_grid: need 0 < lo < hi");
  if (n < 2) throw argument_error("log_grid: need n >= 2");
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
  return g;
}

}  // namespace augmc
