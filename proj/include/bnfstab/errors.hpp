#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bnfstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on the number of degrees of freedom or a point has the
/// wrong length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a homogeneous block (or a given degree) got
/// something else.
class GradingError : public Error {
 public:
  using Error::Error;
};

/// Lie exponential requested with a generating function of degree < 3; the
/// truncated series would not terminate.
class NilpotencyError : public Error {
 public:
  using Error::Error;
};

/// A polynomial that should be real after leaving the complex chart is not.
class RealityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotEllipticError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class OrderOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class HyperbolicOrbitError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateRadiusError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnknownFixtureError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A divisor <k, omega> fell below the resonance tolerance.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, std::vector<int> k, double divisor)
      : Error(what), k_(std::move(k)), divisor_(divisor) {}
  const std::vector<int>& k() const noexcept { return k_; }
  double divisor() const noexcept { return divisor_; }

 private:
  std::vector<int> k_;
  double divisor_;
};

/// Small divisor met while solving a homological equation at some order.
class SmallDivisorError : public ResonanceError {
 public:
  SmallDivisorError(const std::string& what, std::vector<int> k, double divisor, int order)
      : ResonanceError(what, std::move(k), divisor), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

}  // namespace bnfstab
