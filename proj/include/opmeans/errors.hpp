#pragma once

#include <stdexcept>
#include <string>

namespace opmeans {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

/// An eigenvalue (or scalar argument) falls outside the domain of an operation.
class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, double offending)
      : Error(what + " (offending eigenvalue " + format_value(offending) + ")"), value_(offending) {}
  explicit DomainViolation(const std::string& what) : Error(what) {}

  double offending_value() const { return value_; }

 private:
  static std::string format_value(double v);
  double value_ = 0.0;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ZeroExponent : public Error {
 public:
  ZeroExponent() : Error("power mean exponent p = 0 is not defined; use geometric_w") {}
};

class ZeroOperator : public Error {
 public:
  ZeroOperator() : Error("angle undefined for a zero operator") {}
};

class NoSignChange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace opmeans
