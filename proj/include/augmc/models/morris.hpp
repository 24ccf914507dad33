#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "augmc/densities.hpp"
#include "augmc/errors.hpp"
#include "augmc/rng.hpp"

namespace augmc {

// Three-stage normal hierarchy:
//   y_i | theta_i ~ N(theta_i, V_i)   (V_i known)
//   theta_i | A   ~ N(0, A)  i.i.d.
//   A             ~ lambda / chi_square(q)
// Conditionals:
//   theta_i | A, y ~ N((1-B_i) y_i, V_i (1-B_i)),  B_i = V_i / (V_i + A)
//   A | theta      ~ (lambda + |theta|^2) / chi_square(k + q)
class morris_model {
 public:
  morris_model(Eigen::VectorXd y, Eigen::VectorXd V, double lambda, double q)
      : y_(std::move(y)), V_(std::move(V)), lambda_(lambda), q_(q) {
    if (y_.size() < 1) throw domain_error("morris_model: k must be >= 1");
    if (V_.size() != y_.size())
      throw domain_error("morris_model: y and V must have equal length");
    if ((V_.array() <= 0.0).any())
      throw domain_error("morris_model: all V_i must be > 0");
    if (lambda_ <= 0.0) throw domain_error("morris_model: lambda must be > 0");
    if (q_ <= 0.0) throw domain_error("morris_model: q must be > 0");
  }

  std::size_t k() const { return static_cast<std::size_t>(y_.size()); }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& V() const { return V_; }
  double lambda() const { return lambda_; }
  double q() const { return q_; }

  Eigen::VectorXd shrinkage(double A) const {
    check_a(A);
    return V_.array() / (V_.array() + A);
  }

  Eigen::VectorXd sample_theta(double A, rng_stream& rng) const {
    const Eigen::VectorXd B = shrinkage(A);
    Eigen::VectorXd theta(y_.size());
    for (Eigen::Index i = 0; i < y_.size(); ++i)
      theta[i] = rng.normal((1.0 - B[i]) * y_[i],
                            std::sqrt(V_[i] * (1.0 - B[i])));
    return theta;
  }

  double sample_a(const Eigen::VectorXd& theta, rng_stream& rng) const {
    check_theta(theta);
    return rng.scaled_inv_chi_square(a_posterior_dof(),
                                     lambda_ + theta.squaredNorm());
  }

  double a_posterior_dof() const { return static_cast<double>(k()) + q_; }

  // Conditional moments of A | theta used by Rao-Blackwellized estimators.
  double a_cond_mean(const Eigen::VectorXd& theta) const {
    check_theta(theta);
    const double dof = a_posterior_dof();
    if (dof <= 2.0)
      throw domain_error("morris_model: E[A|theta] needs k + q > 2");
    return (lambda_ + theta.squaredNorm()) / (dof - 2.0);
  }

  double a_cond_second_moment(const Eigen::VectorXd& theta) const {
    check_theta(theta);
    const double dof = a_posterior_dof();
    if (dof <= 4.0)
      throw domain_error("morris_model: E[A^2|theta] needs k + q > 4");
    const double s = lambda_ + theta.squaredNorm();
    return s * s / ((dof - 2.0) * (dof - 4.0));
  }

  double log_a_density_given_theta(double A, const Eigen::VectorXd& theta) const {
    check_theta(theta);
    return log_scaled_inv_chi_square_pdf(A, a_posterior_dof(),
                                         lambda_ + theta.squaredNorm());
  }

  double log_theta_density_given_a(const Eigen::VectorXd& theta, double A) const {
    check_theta(theta);
    check_a(A);
    const Eigen::VectorXd B = shrinkage(A);
    double logp = 0.0;
    for (Eigen::Index i = 0; i < y_.size(); ++i)
      logp += log_normal_pdf(theta[i], (1.0 - B[i]) * y_[i],
                             V_[i] * (1.0 - B[i]));
    return logp;
  }

  double log_prior_a(double A) const {
    return log_scaled_inv_chi_square_pdf(A, q_, lambda_);
  }

  // Unnormalized log posterior of A after integrating theta out:
  // y_i | A ~ N(0, V_i + A) independently.
  double log_marginal_a(double A) const {
    if (A <= 0.0) return -std::numeric_limits<double>::infinity();
    double logp = log_prior_a(A);
    for (Eigen::Index i = 0; i < y_.size(); ++i)
      logp += log_normal_pdf(y_[i], 0.0, V_[i] + A);
    return logp;
  }

 private:
  void check_a(double A) const {
    if (A <= 0.0) throw domain_error("morris_model: A must be > 0");
  }
  void check_theta(const Eigen::VectorXd& theta) const {
    if (theta.size() != y_.size())
      throw argument_error("morris_model: theta length mismatch");
  }

  Eigen::VectorXd y_;
  Eigen::VectorXd V_;
  double lambda_;
  double q_;
};

// Augmented-model views. Both parameter roles are exposed: pick which block
// plays the parameter and which the latent variable.

// A is the parameter, theta the latent block.
struct morris_a_view {
  const morris_model* model;

  using theta_type = double;
  using z_type = Eigen::VectorXd;

  z_type sample_z(const theta_type& a, rng_stream& rng) const {
    return model->sample_theta(a, rng);
  }
  theta_type sample_theta(const z_type& theta, rng_stream& rng) const {
    return model->sample_a(theta, rng);
  }
  double log_theta_density(const theta_type& a, const z_type& theta) const {
    return model->log_a_density_given_theta(a, theta);
  }
};

// theta is the parameter, A the latent scalar.
struct morris_theta_view {
  const morris_model* model;

  using theta_type = Eigen::VectorXd;
  using z_type = double;

  z_type sample_z(const theta_type& theta, rng_stream& rng) const {
    return model->sample_a(theta, rng);
  }
  theta_type sample_theta(const z_type& a, rng_stream& rng) const {
    return model->sample_theta(a, rng);
  }
  double log_theta_density(const theta_type& theta, const z_type& a) const {
    return model->log_theta_density_given_a(theta, a);
  }
};

struct morris_views {
  morris_a_view a_view;
  morris_theta_view theta_view;
};

inline morris_views morris_conditionals(const morris_model& m) {
  return {morris_a_view{&m}, morris_theta_view{&m}};
}

// The fixed reference dataset used across tests and experiments.
inline morris_model morris_reference_model() {
  Eigen::VectorXd y(4);
  y << 1.0, -1.0, 2.0, 0.0;
  return morris_model(y, Eigen::VectorXd::Ones(4), 1.0, 1.0);
}

}  // namespace augmc
