#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>

#include "augmc/densities.hpp"
#include "augmc/errors.hpp"
#include "augmc/rng.hpp"
#include "augmc/target.hpp"

namespace augmc {

// Linear model y = X beta + eps with i.i.d. unit-scale Student-t errors of
// fixed dof and a flat prior on beta. Two routes to the same posterior:
//   direct:    log p(beta | y) = sum_i log t_dof(y_i - x_i' beta)
//   augmented: w_i | beta ~ Gamma((dof+1)/2, rate (dof + r_i^2)/2)
//              beta | w   ~ N((X'WX)^{-1} X'Wy, (X'WX)^{-1})
class t_regression_model {
 public:
  t_regression_model(Eigen::MatrixXd X, Eigen::VectorXd y, double dof)
      : X_(std::move(X)), y_(std::move(y)), dof_(dof) {
    if (X_.rows() != y_.size())
      throw domain_error("t_regression_model: X rows must match y length");
    if (dof_ <= 0.0) throw domain_error("t_regression_model: dof must be > 0");
    if (X_.rows() > 0 && X_.cols() > 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X_);
      if (qr.rank() < X_.cols())
        throw domain_error("t_regression_model: X must have full column rank");
    }
  }

  std::size_t n() const { return static_cast<std::size_t>(X_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(X_.cols()); }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }
  double dof() const { return dof_; }

  Eigen::VectorXd residuals(const Eigen::VectorXd& beta) const {
    check_beta(beta);
    return y_ - X_ * beta;
  }

  double log_posterior(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd r = residuals(beta);
    double logp = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
      logp += log_student_t_pdf(r[i], dof_);
    return logp;
  }

  target_density direct_target() const {
    return target_density(p(), [self = *this](std::span<const double> b) {
      return self.log_posterior(
          Eigen::Map<const Eigen::VectorXd>(b.data(),
                                            static_cast<Eigen::Index>(b.size())));
    });
  }

  Eigen::VectorXd sample_weights(const Eigen::VectorXd& beta,
                                 rng_stream& rng) const {
    const Eigen::VectorXd r = residuals(beta);
    Eigen::VectorXd w(r.size());
    const double shape = 0.5 * (dof_ + 1.0);
    for (Eigen::Index i = 0; i < r.size(); ++i)
      w[i] = rng.gamma(shape, 2.0 / (dof_ + r[i] * r[i]));
    return w;
  }

  // Weighted least-squares posterior pieces given weights w.
  Eigen::MatrixXd weighted_precision(const Eigen::VectorXd& w) const {
    check_weights(w);
    return X_.transpose() * w.asDiagonal() * X_;
  }

  Eigen::VectorXd wls_mean(const Eigen::VectorXd& w) const {
    const Eigen::MatrixXd precision = weighted_precision(w);
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      throw numeric_error("t_regression_model: X'WX is numerically singular");
    return llt.solve(X_.transpose() * (w.asDiagonal() * y_));
  }

  // Collective move: the whole beta vector in one multivariate normal draw.
  Eigen::VectorXd sample_beta(const Eigen::VectorXd& w, rng_stream& rng) const {
    const Eigen::MatrixXd precision = weighted_precision(w);
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      throw numeric_error("t_regression_model: X'WX is numerically singular");
    const Eigen::VectorXd mean =
        llt.solve(X_.transpose() * (w.asDiagonal() * y_));
    Eigen::VectorXd z(X_.cols());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
    // precision = L L',  cov = L'^{-1} L^{-1}, so beta = mean + L'^{-1} z.
    return mean + llt.matrixU().solve(z);
  }

  double log_beta_density_given_weights(const Eigen::VectorXd& beta,
                                        const Eigen::VectorXd& w) const {
    check_beta(beta);
    const Eigen::MatrixXd precision = weighted_precision(w);
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      throw numeric_error("t_regression_model: X'WX is numerically singular");
    const Eigen::VectorXd mean =
        llt.solve(X_.transpose() * (w.asDiagonal() * y_));
    const Eigen::VectorXd d = beta - mean;
    double log_det = 0.0;  // log det(precision) from the Cholesky diagonal
    const Eigen::MatrixXd L = llt.matrixL();
    for (Eigen::Index j = 0; j < L.rows(); ++j)
      log_det += 2.0 * std::log(L(j, j));
    const double quad = d.dot(precision * d);
    return 0.5 * (log_det -
                  static_cast<double>(X_.cols()) *
                      std::log(2.0 * std::numbers::pi) -
                  quad);
  }

  // E-step weights: E[w_i | beta, y] = (dof + 1) / (dof + r_i^2).
  Eigen::VectorXd expected_weights(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd r = residuals(beta);
    return (dof_ + 1.0) / (dof_ + r.array().square());
  }

 private:
  void check_beta(const Eigen::VectorXd& beta) const {
    if (beta.size() != X_.cols())
      throw argument_error("t_regression_model: beta length mismatch");
  }
  void check_weights(const Eigen::VectorXd& w) const {
    if (w.size() != X_.rows())
      throw argument_error("t_regression_model: weights length mismatch");
    if ((w.array() < 0.0).any())
      throw argument_error("t_regression_model: weights must be >= 0");
  }

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  double dof_;
};

// Augmented-model adapter: beta is the parameter, the weight vector the
// latent block. Also carries the EM capability (expected weights as the
// sufficient statistics, weighted least squares as the M-step).
struct treg_augmented_view {
  const t_regression_model* model;

  using theta_type = Eigen::VectorXd;
  using z_type = Eigen::VectorXd;
  using suff_type = Eigen::VectorXd;

  z_type sample_z(const theta_type& beta, rng_stream& rng) const {
    return model->sample_weights(beta, rng);
  }
  theta_type sample_theta(const z_type& w, rng_stream& rng) const {
    return model->sample_beta(w, rng);
  }
  double log_theta_density(const theta_type& beta, const z_type& w) const {
    return model->log_beta_density_given_weights(beta, w);
  }

  suff_type expected_suff(const theta_type& beta) const {
    return model->expected_weights(beta);
  }
  theta_type m_step(const suff_type& w_hat) const {
    return model->wls_mean(w_hat);
  }
  double observed_loglik(const theta_type& beta) const {
    return model->log_posterior(beta);
  }
};

inline treg_augmented_view treg_augmented(const t_regression_model& m) {
  return treg_augmented_view{&m};
}

inline target_density treg_direct_target(const t_regression_model& m) {
  return m.direct_target();
}

}  // namespace augmc
