#pragma once

#include <stdexcept>
#include <string>

namespace augmc {

// Base for everything thrown by this library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A distribution or model parameter outside its domain (sd < 0, shape <= 0, ...).
class domain_error : public error {
public:
  using error::error;
};

// An operation was called with unusable arguments (empty series, bad lengths, ...).
class argument_error : public error {
public:
  using error::error;
};

// A model lacks an optional capability the operation needs (e.g. a density evaluator).
class capability_error : public error {
public:
  using error::error;
};

// A state space or problem size exceeds what an exact method can handle.
class capacity_error : public error {
public:
  using error::error;
};

// Numerical failure: rank deficiency, bad curvature, broken internal consistency.
class numeric_error : public error {
public:
  using error::error;
};

// Experiment configuration problems (parse errors, unknown keys, bad values).
class config_error : public error {
public:
  using error::error;
};

}  // namespace augmc
