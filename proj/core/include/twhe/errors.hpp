#pragma once

#include <stdexcept>
#include <string>

namespace twhe {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array sizes, ranks or dimensions that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Inputs outside the domain an operation is defined on (non-positive
// metric, non-(1,1) form, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Floating point breakdown: positivity floor breach, non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Poisson right-hand side not orthogonal to the kernel.
class SolvabilityError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

// Bad configuration file or preset name. Carries the offending location.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string where = {})
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace twhe
