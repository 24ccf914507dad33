#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "augmc/densities.hpp"
#include "augmc/errors.hpp"
#include "augmc/rng.hpp"

namespace augmc {

// Fully tabulated joint p(theta, z) on a finite grid. Both conditionals are
// exact categorical draws, and the joint/marginals are available in closed
// form, which makes this the enumeration oracle's favorite test subject.
class discrete_augmented_model {
 public:
  explicit discrete_augmented_model(Eigen::MatrixXd joint)
      : joint_(std::move(joint)) {
    if (joint_.rows() < 1 || joint_.cols() < 1)
      throw domain_error("discrete_augmented_model: empty table");
    if ((joint_.array() < 0.0).any())
      throw domain_error("discrete_augmented_model: negative weight");
    const double total = joint_.sum();
    if (total <= 0.0)
      throw domain_error("discrete_augmented_model: all-zero table");
    joint_ /= total;
  }

  using theta_type = std::size_t;
  using z_type = std::size_t;

  std::size_t n_theta() const { return static_cast<std::size_t>(joint_.rows()); }
  std::size_t n_z() const { return static_cast<std::size_t>(joint_.cols()); }
  const Eigen::MatrixXd& joint() const { return joint_; }

  std::vector<double> z_conditional(theta_type theta) const {
    check_theta(theta);
    const auto row = joint_.row(static_cast<Eigen::Index>(theta));
    const double s = row.sum();
    if (s <= 0.0)
      throw argument_error("discrete_augmented_model: theta has zero mass");
    std::vector<double> p(n_z());
    for (std::size_t j = 0; j < n_z(); ++j)
      p[j] = row[static_cast<Eigen::Index>(j)] / s;
    return p;
  }

  std::vector<double> theta_conditional(z_type z) const {
    check_z(z);
    const auto col = joint_.col(static_cast<Eigen::Index>(z));
    const double s = col.sum();
    if (s <= 0.0)
      throw argument_error("discrete_augmented_model: z has zero mass");
    std::vector<double> p(n_theta());
    for (std::size_t i = 0; i < n_theta(); ++i)
      p[i] = col[static_cast<Eigen::Index>(i)] / s;
    return p;
  }

  std::vector<double> theta_marginal() const {
    std::vector<double> p(n_theta());
    for (std::size_t i = 0; i < n_theta(); ++i)
      p[i] = joint_.row(static_cast<Eigen::Index>(i)).sum();
    return p;
  }

  z_type sample_z(const theta_type& theta, rng_stream& rng) const {
    const std::vector<double> p = z_conditional(theta);
    return sample_categorical(p, rng);
  }

  theta_type sample_theta(const z_type& z, rng_stream& rng) const {
    const std::vector<double> p = theta_conditional(z);
    return sample_categorical(p, rng);
  }

  double log_theta_density(const theta_type& theta, const z_type& z) const {
    const std::vector<double> p = theta_conditional(z);
    check_theta(theta);
    return std::log(p[theta]);
  }

 private:
  void check_theta(theta_type t) const {
    if (t >= n_theta())
      throw argument_error("discrete_augmented_model: theta out of range");
  }
  void check_z(z_type z) const {
    if (z >= n_z())
      throw argument_error("discrete_augmented_model: z out of range");
  }

  Eigen::MatrixXd joint_;
};

// Standard bivariate normal pair with correlation rho: each conditional is
// N(rho * other, 1 - rho^2). The conjugate-normal toy behind the
// Rao-Blackwell variance comparisons: E[theta | z] = rho * z exactly.
struct gaussian_pair_model {
  double rho;

  using theta_type = double;
  using z_type = double;

  gaussian_pair_model(double correlation) : rho(correlation) {
    if (!(rho > -1.0 && rho < 1.0))
      throw domain_error("gaussian_pair_model: need |rho| < 1");
  }

  z_type sample_z(const theta_type& theta, rng_stream& rng) const {
    return rng.normal(rho * theta, std::sqrt(1.0 - rho * rho));
  }
  theta_type sample_theta(const z_type& z, rng_stream& rng) const {
    return rng.normal(rho * z, std::sqrt(1.0 - rho * rho));
  }
  double log_theta_density(const theta_type& theta, const z_type& z) const {
    return log_normal_pdf(theta, rho * z, 1.0 - rho * rho);
  }
  double conditional_mean(const z_type& z) const { return rho * z; }
};

// Two-component mixture with known component log-densities and an unknown
// mixing weight: x_j ~ pi f1 + (1 - pi) f0, latent class c_j per point.
// EM reduces to averaging the responsibilities, so a grid search over pi is
// a cheap exact oracle.
class mixture_weight_model {
 public:
  mixture_weight_model(std::vector<double> x,
                       std::function<double(double)> log_f0,
                       std::function<double(double)> log_f1)
      : x_(std::move(x)), log_f0_(std::move(log_f0)),
        log_f1_(std::move(log_f1)) {
    if (x_.empty()) throw domain_error("mixture_weight_model: no data");
  }

  using theta_type = double;               // mixing weight pi in (0,1)
  using z_type = std::vector<std::size_t>; // class labels
  using suff_type = double;                // mean responsibility

  std::size_t n() const { return x_.size(); }
  const std::vector<double>& data() const { return x_; }

  // P(c_j = 1 | x_j, pi) for each observation.
  std::vector<double> responsibilities(double pi) const {
    check_pi(pi);
    std::vector<double> r(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const double a = std::log(pi) + log_f1_(x_[j]);
      const double b = std::log1p(-pi) + log_f0_(x_[j]);
      const double m = std::max(a, b);
      r[j] = std::exp(a - m) / (std::exp(a - m) + std::exp(b - m));
    }
    return r;
  }

  z_type sample_z(const theta_type& pi, rng_stream& rng) const {
    const std::vector<double> r = responsibilities(pi);
    z_type c(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j)
      c[j] = rng.uniform01() < r[j] ? 1 : 0;
    return c;
  }

  // Conjugate-free stand-in for tests: draw pi | c ~ Beta(1 + #1, 1 + #0)
  // via two gamma draws.
  theta_type sample_theta(const z_type& c, rng_stream& rng) const {
    if (c.size() != x_.size())
      throw argument_error("mixture_weight_model: label length mismatch");
    double ones = 0.0;
    for (const std::size_t cj : c) ones += cj ? 1.0 : 0.0;
    const double g1 = rng.gamma(1.0 + ones, 1.0);
    const double g0 =
        rng.gamma(1.0 + static_cast<double>(c.size()) - ones, 1.0);
    return g1 / (g1 + g0);
  }

  suff_type expected_suff(const theta_type& pi) const {
    const std::vector<double> r = responsibilities(pi);
    double sum = 0.0;
    for (const double rj : r) sum += rj;
    return sum / static_cast<double>(r.size());
  }

  theta_type m_step(const suff_type& mean_resp) const {
    return std::min(1.0 - 1e-12, std::max(1e-12, mean_resp));
  }

  double observed_loglik(const theta_type& pi) const {
    check_pi(pi);
    double ll = 0.0;
    for (const double xj : x_) {
      const double a = std::log(pi) + log_f1_(xj);
      const double b = std::log1p(-pi) + log_f0_(xj);
      const double m = std::max(a, b);
      ll += m + std::log(std::exp(a - m) + std::exp(b - m));
    }
    return ll;
  }

 private:
  void check_pi(double pi) const {
    if (!(pi > 0.0 && pi < 1.0))
      throw domain_error("mixture_weight_model: pi must be in (0,1)");
  }

  std::vector<double> x_;
  std::function<double(double)> log_f0_;
  std::function<double(double)> log_f1_;
};

}  // namespace augmc
