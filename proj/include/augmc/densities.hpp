#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "augmc/errors.hpp"

namespace augmc {

inline double log_normal_pdf(double x, double mean, double var) {
  if (var <= 0.0) throw domain_error("log_normal_pdf: variance must be > 0");
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

// Gamma with shape/rate parameterization.
inline double log_gamma_pdf(double x, double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw domain_error("log_gamma_pdf: shape and rate must be > 0");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

// Density of numerator / chi_square(dof) at x.
inline double log_scaled_inv_chi_square_pdf(double x, double dof,
                                            double numerator) {
  if (dof <= 0.0 || numerator <= 0.0)
    throw domain_error(
        "log_scaled_inv_chi_square_pdf: dof and numerator must be > 0");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  const double h = 0.5 * dof;
  return h * std::log(0.5 * numerator) - std::lgamma(h) -
         (h + 1.0) * std::log(x) - 0.5 * numerator / x;
}

// Standard Student t with dof degrees of freedom (unit scale).
inline double log_student_t_pdf(double x, double dof) {
  if (dof <= 0.0) throw domain_error("log_student_t_pdf: dof must be > 0");
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi) -
         0.5 * (dof + 1.0) * std::log1p(x * x / dof);
}

}  // namespace augmc
