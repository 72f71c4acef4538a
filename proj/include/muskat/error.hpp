#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace muskat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of the operation (s ∉ (0,2], t < 0, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Input samples violate a structural invariant (non-finite value, bad size,
/// unsorted nodes).
class InputError : public Error {
public:
  using Error::Error;
};

/// The state left the admissible strip |f| < l.
class AdmissibilityError : public Error {
public:
  AdmissibilityError(const std::string& what, double max_abs, std::size_t node)
      : Error(what), max_abs_(max_abs), node_(node) {}

  double max_abs() const noexcept { return max_abs_; }
  std::size_t node() const noexcept { return node_; }

private:
  double max_abs_;
  std::size_t node_;
};

/// Adaptive quadrature did not converge; carries the worst cell.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double cell_lo, double cell_hi)
      : Error(what), cell_lo_(cell_lo), cell_hi_(cell_hi) {}

  double cell_lo() const noexcept { return cell_lo_; }
  double cell_hi() const noexcept { return cell_hi_; }

private:
  double cell_lo_;
  double cell_hi_;
};

/// The adaptive integrator shrank its step below dt_min.
class StepSizeUnderflow : public Error {
public:
  StepSizeUnderflow(const std::string& what, double t, double dt)
      : Error(what), t_(t), dt_(dt) {}

  double t() const noexcept { return t_; }
  double dt() const noexcept { return dt_; }

private:
  double t_;
  double dt_;
};

/// A bound check was requested on data that does not meet its preconditions.
class CheckRefused : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed persisted file; line is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace muskat
