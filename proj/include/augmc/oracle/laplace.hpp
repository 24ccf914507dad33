#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "augmc/errors.hpp"
#include "augmc/target.hpp"

namespace augmc {

using log_fn = std::function<double(std::span<const double>)>;

struct mode_search_options {
  std::size_t max_iter = 200;
  double grad_tol = 1e-6;    // sup-norm of the gradient at the mode
  double fd_step = 1e-6;     // relative central-difference step (gradient)
  double hess_step = 1e-4;   // relative central-difference step (Hessian)
};

struct mode_result {
  Eigen::VectorXd mode;
  double value = 0.0;
  Eigen::MatrixXd hessian;  // of the maximized function, at the mode
};

namespace detail {

inline double eval_log_fn(const log_fn& f, const Eigen::VectorXd& x) {
  return f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

inline Eigen::VectorXd fd_gradient(const log_fn& f, const Eigen::VectorXd& x,
                                   double rel_step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = eval_log_fn(f, xp);
    xp[i] = x[i] - h;
    const double fm = eval_log_fn(f, xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const log_fn& f, const Eigen::VectorXd& x,
                                  double rel_step) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd h_mat(d, d);
  const double f0 = eval_log_fn(f, x);
  Eigen::VectorXd xp = x;
  std::vector<double> steps(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    steps[static_cast<std::size_t>(i)] = rel_step * (1.0 + std::abs(x[i]));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double hi = steps[static_cast<std::size_t>(i)];
    xp[i] = x[i] + hi;
    const double fp = eval_log_fn(f, xp);
    xp[i] = x[i] - hi;
    const double fm = eval_log_fn(f, xp);
    xp[i] = x[i];
    h_mat(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double hj = steps[static_cast<std::size_t>(j)];
      xp[i] = x[i] + hi; xp[j] = x[j] + hj;
      const double fpp = eval_log_fn(f, xp);
      xp[j] = x[j] - hj;
      const double fpm = eval_log_fn(f, xp);
      xp[i] = x[i] - hi; xp[j] = x[j] + hj;
      const double fmp = eval_log_fn(f, xp);
      xp[j] = x[j] - hj;
      const double fmm = eval_log_fn(f, xp);
      xp[i] = x[i]; xp[j] = x[j];
      h_mat(i, j) = h_mat(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return h_mat;
}

}  // namespace detail

// Maximize a smooth log-density by BFGS with central-difference gradients
// and Armijo backtracking; returns mode, value, and finite-difference
// Hessian there.
inline mode_result find_mode(const log_fn& f, Eigen::VectorXd start,
                             const mode_search_options& opt = {}) {
  if (start.size() == 0) throw argument_error("find_mode: empty start point");
  double value = detail::eval_log_fn(f, start);
  if (!std::isfinite(value))
    throw argument_error("find_mode: start point has zero density");
  const Eigen::Index d = start.size();
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd grad = detail::fd_gradient(f, start, opt.fd_step);
  bool converged = grad.lpNorm<Eigen::Infinity>() < opt.grad_tol;
  for (std::size_t iter = 0; iter < opt.max_iter && !converged; ++iter) {
    Eigen::VectorXd direction = h_inv * grad;  // ascent direction
    if (direction.dot(grad) <= 0.0) {
      h_inv = Eigen::MatrixXd::Identity(d, d);
      direction = grad;
    }
    // Armijo backtracking on the ascent condition.
    double step = 1.0;
    const double slope = grad.dot(direction);
    Eigen::VectorXd next;
    double next_value = -std::numeric_limits<double>::infinity();
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      next = start + step * direction;
      next_value = detail::eval_log_fn(f, next);
      if (std::isfinite(next_value) &&
          next_value >= value + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved)
      throw numeric_error("find_mode: line search failed to make progress");
    const Eigen::VectorXd next_grad = detail::fd_gradient(f, next, opt.fd_step);
    const Eigen::VectorXd s = next - start;
    const Eigen::VectorXd yv = next_grad - grad;  // gradient change
    const double sy = s.dot(yv);
    // BFGS update on the inverse Hessian of the negated objective; skip on
    // tiny curvature to preserve positive definiteness.
    if (std::abs(sy) > 1e-12 * s.norm() * yv.norm() && sy < 0.0) {
      const Eigen::VectorXd hy = h_inv * yv;
      const double yhy = yv.dot(hy);
      h_inv += ((yhy - sy) / (sy * sy)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    start = next;
    value = next_value;
    grad = next_grad;
    converged = grad.lpNorm<Eigen::Infinity>() < opt.grad_tol;
  }
  if (!converged)
    throw numeric_error("find_mode: mode search did not converge");
  mode_result result;
  result.mode = start;
  result.value = value;
  result.hessian = detail::fd_hessian(f, start, opt.hess_step);
  return result;
}

namespace detail {

// log of the Gaussian-integral factor exp(l(mode)) (2 pi)^{d/2} |−H|^{-1/2}.
inline double log_laplace_integral(const mode_result& m) {
  const Eigen::LLT<Eigen::MatrixXd> llt(-m.hessian);
  if (llt.info() != Eigen::Success)
    throw numeric_error("laplace: Hessian at mode is not negative definite");
  double log_det_neg_h = 0.0;
  const Eigen::MatrixXd l_factor = llt.matrixL();
  for (Eigen::Index i = 0; i < l_factor.rows(); ++i)
    log_det_neg_h += 2.0 * std::log(l_factor(i, i));
  const double d = static_cast<double>(m.mode.size());
  return m.value + 0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * log_det_neg_h;
}

}  // namespace detail

// Fully-exponential approximation of E[g] under the (unnormalized) target:
// the ratio of the Laplace integrals of g * target and target, each expanded
// around its own mode. Requires g > 0 near the relevant modes.
inline double laplace_moments(const target_density& target, const log_fn& g,
                              const Eigen::VectorXd& start,
                              const mode_search_options& opt = {}) {
  if (static_cast<std::size_t>(start.size()) != target.dimension())
    throw argument_error("laplace_moments: start dimension mismatch");
  const log_fn log_target = [&target](std::span<const double> x) {
    return target(x);
  };
  const log_fn log_numerator = [&target, &g](std::span<const double> x) {
    const double gv = g(x);
    if (!(gv > 0.0))
      return -std::numeric_limits<double>::infinity();
    return std::log(gv) + target(x);
  };
  const double g_at_start = g(std::span<const double>(
      start.data(), static_cast<std::size_t>(start.size())));
  if (!(g_at_start > 0.0))
    throw argument_error("laplace_moments: g must be positive at the start");
  const mode_result denom = find_mode(log_target, start, opt);
  const mode_result numer = find_mode(log_numerator, denom.mode, opt);
  return std::exp(detail::log_laplace_integral(numer) -
                  detail::log_laplace_integral(denom));
}

// Shift helper for functions that may be nonpositive: E[g] = E[g + c] - c.
inline double laplace_moments_shifted(const target_density& target,
                                      const log_fn& g, double shift,
                                      const Eigen::VectorXd& start,
                                      const mode_search_options& opt = {}) {
  const log_fn shifted = [&g, shift](std::span<const double> x) {
    return g(x) + shift;
  };
  return laplace_moments(target, shifted, start, opt) - shift;
}

}  // namespace augmc
