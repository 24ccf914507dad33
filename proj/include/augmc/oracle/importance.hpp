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
#include "augmc/rng.hpp"
#include "augmc/target.hpp"

namespace augmc {

// Multivariate Student t with location mu, scatter matrix S (so the
// covariance is S * dof / (dof - 2)), and dof degrees of freedom.
struct mvt_proposal {
  Eigen::VectorXd location;
  Eigen::MatrixXd scatter;
  double dof;

  mvt_proposal(Eigen::VectorXd loc, Eigen::MatrixXd sc, double d)
      : location(std::move(loc)), scatter(std::move(sc)), dof(d) {
    if (dof <= 2.0)
      throw domain_error("mvt_proposal: dof must exceed 2 for a covariance");
    llt_.compute(scatter);
    if (llt_.info() != Eigen::Success)
      throw numeric_error("mvt_proposal: scatter not positive definite");
    const Eigen::MatrixXd l_factor = llt_.matrixL();
    log_det_scatter_ = 0.0;
    for (Eigen::Index i = 0; i < l_factor.rows(); ++i)
      log_det_scatter_ += 2.0 * std::log(l_factor(i, i));
  }

  Eigen::Index dim() const { return location.size(); }

  // Draw order is fixed: the normal vector first, then the chi-square.
  Eigen::VectorXd sample(rng_stream& rng) const {
    Eigen::VectorXd z(dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const double u = rng.chi_square(dof);
    return location +
           (Eigen::MatrixXd(llt_.matrixL()) * z) * std::sqrt(dof / u);
  }

  double log_pdf(const Eigen::VectorXd& x) const {
    const double d = static_cast<double>(dim());
    const Eigen::VectorXd delta = x - location;
    const double quad = delta.dot(llt_.solve(delta));
    return std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
           0.5 * d * std::log(dof * std::numbers::pi) -
           0.5 * log_det_scatter_ -
           0.5 * (dof + d) * std::log1p(quad / dof);
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_scatter_ = 0.0;
};

struct is_result {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double weight_ess = 0.0;  // (sum w)^2 / sum w^2 for the final round
  bool degenerate = false;  // final-round weight ESS below 10
  std::size_t rounds = 0;
  // Final-round sample, for resampling pipelines and follow-up estimates.
  std::vector<Eigen::VectorXd> draws;
  std::vector<double> log_weights;  // log target - log proposal, unshifted
};

// Adaptive multivariate-t importance sampling: each round draws from the
// current proposal, reweights toward the target, and refits the proposal's
// location/scatter from the weighted moments.
inline is_result importance_sampling_student_t(
    const target_density& target, std::size_t n_draws,
    std::size_t adapt_rounds, double dof, rng_stream& rng,
    Eigen::VectorXd init_location = Eigen::VectorXd(),
    Eigen::MatrixXd init_scatter = Eigen::MatrixXd()) {
  const auto dim = static_cast<Eigen::Index>(target.dimension());
  if (n_draws < 2)
    throw argument_error("importance_sampling_student_t: n_draws too small");
  if (adapt_rounds < 1)
    throw argument_error("importance_sampling_student_t: need >= 1 round");
  if (dof <= 2.0)
    throw domain_error("importance_sampling_student_t: dof must be > 2");
  if (init_location.size() == 0) init_location = Eigen::VectorXd::Zero(dim);
  if (init_scatter.size() == 0)
    init_scatter = Eigen::MatrixXd::Identity(dim, dim);
  if (init_location.size() != dim || init_scatter.rows() != dim ||
      init_scatter.cols() != dim)
    throw argument_error("importance_sampling_student_t: bad init dimensions");

  Eigen::VectorXd location = init_location;
  Eigen::MatrixXd scatter = init_scatter;
  is_result result;

  for (std::size_t round = 0; round < adapt_rounds; ++round) {
    const mvt_proposal proposal(location, scatter, dof);
    std::vector<Eigen::VectorXd> draws(n_draws);
    std::vector<double> log_w(n_draws);
    double max_log_w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_draws; ++i) {
      draws[i] = proposal.sample(rng);
      const double lt = target(std::span<const double>(
          draws[i].data(), static_cast<std::size_t>(draws[i].size())));
      log_w[i] = lt - proposal.log_pdf(draws[i]);
      max_log_w = std::max(max_log_w, log_w[i]);
    }
    if (!std::isfinite(max_log_w))
      throw numeric_error(
          "importance_sampling_student_t: all draws have zero target mass");
    double sum_w = 0.0, sum_w2 = 0.0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < n_draws; ++i) {
      const double w = std::exp(log_w[i] - max_log_w);
      sum_w += w;
      sum_w2 += w * w;
      mean += w * draws[i];
    }
    mean /= sum_w;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < n_draws; ++i) {
      const double w = std::exp(log_w[i] - max_log_w);
      const Eigen::VectorXd d = draws[i] - mean;
      cov += w * (d * d.transpose());
    }
    cov /= sum_w;

    result.mean = mean;
    result.cov = cov;
    result.weight_ess = sum_w * sum_w / sum_w2;
    result.rounds = round + 1;
    result.draws = std::move(draws);
    result.log_weights = std::move(log_w);

    location = mean;
    // Scatter so the next proposal's covariance matches the estimate.
    scatter = cov * ((dof - 2.0) / dof);
  }
  result.degenerate = result.weight_ess < 10.0;
  return result;
}

// Self-normalized estimate of E[h] from the final round, with its
// delta-method standard error.
struct weighted_estimate {
  double value = 0.0;
  double se = 0.0;
};

inline weighted_estimate is_expectation(
    const is_result& result,
    const std::function<double(std::span<const double>)>& h) {
  if (result.draws.empty())
    throw argument_error("is_expectation: empty importance sample");
  double max_log_w = -std::numeric_limits<double>::infinity();
  for (const double lw : result.log_weights)
    max_log_w = std::max(max_log_w, lw);
  double sum_w = 0.0;
  std::vector<double> w(result.draws.size());
  std::vector<double> hv(result.draws.size());
  for (std::size_t i = 0; i < result.draws.size(); ++i) {
    w[i] = std::exp(result.log_weights[i] - max_log_w);
    sum_w += w[i];
    const auto& x = result.draws[i];
    hv[i] = h(std::span<const double>(x.data(),
                                      static_cast<std::size_t>(x.size())));
  }
  weighted_estimate est;
  for (std::size_t i = 0; i < w.size(); ++i)
    est.value += (w[i] / sum_w) * hv[i];
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wn = w[i] / sum_w;
    var += wn * wn * (hv[i] - est.value) * (hv[i] - est.value);
  }
  est.se = std::sqrt(var);
  return est;
}

}  // namespace augmc
