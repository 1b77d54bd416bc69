#pragma once

#include <stdexcept>
#include <string>

namespace sfsim {

// Base class for every error thrown by this library. Each subclass names the
// contract that was violated so callers can map failures to exit codes and
// user-facing messages without string matching.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched grids, shapes, or dimensions between operands.
class dimension_error : public error {
public:
  using error::error;
};

// A scalar argument is outside its documented domain (bad exponent, bad Lp
// order, non-positive resolution, ...).
class parameter_error : public error {
public:
  using error::error;
};

// A configuration file or initial-data specification failed validation.
class validation_error : public error {
public:
  using error::error;
};

// The density dropped below the positivity floor epsilon. Carries where.
class density_floor_error : public error {
public:
  density_floor_error(double min_rho, double t, const std::string& what)
      : error(what), min_rho_(min_rho), t_(t) {}
  double min_rho() const noexcept { return min_rho_; }
  double time() const noexcept { return t_; }

private:
  double min_rho_;
  double t_;
};

// The implicit-midpoint fixed-point iteration failed to contract.
class contraction_error : public error {
public:
  contraction_error(double t, const std::string& what) : error(what), t_(t) {}
  double time() const noexcept { return t_; }

private:
  double t_;
};

// Requested data outside the stored time range, or an empty history.
class coverage_error : public error {
public:
  using error::error;
};

// Unreadable, truncated, or version-incompatible checkpoint/CSV input.
class format_error : public error {
public:
  using error::error;
};

}  // namespace sfsim
