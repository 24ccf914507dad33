#pragma once

#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "augmc/errors.hpp"

namespace augmc {

struct interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Unnormalized log density over a real vector state.  Returns -inf outside
// the declared per-component support without evaluating the wrapped function.
class target_density {
public:
  using fn_type = std::function<double(std::span<const double>)>;

  target_density(std::size_t dimension, fn_type log_unnormalized,
                 std::vector<interval> support = {})
      : dim_(dimension),
        logf_(std::move(log_unnormalized)),
        support_(std::move(support)) {
    if (dim_ == 0) throw argument_error("target_density: dimension must be >= 1");
    if (!support_.empty() && support_.size() != dim_)
      throw argument_error("target_density: support size != dimension");
  }

  std::size_t dimension() const { return dim_; }
  const std::vector<interval>& support() const { return support_; }

  bool in_support(std::span<const double> x) const {
    if (support_.empty()) return true;
    for (std::size_t i = 0; i < dim_; ++i)
      if (!support_[i].contains(x[i])) return false;
    return true;
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim_)
      throw argument_error("target_density: state has wrong dimension");
    if (!in_support(x)) return -std::numeric_limits<double>::infinity();
    return logf_(x);
  }

private:
  std::size_t dim_;
  fn_type logf_;
  std::vector<interval> support_;
};

}  // namespace augmc
