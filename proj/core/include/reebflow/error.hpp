#pragma once

#include <stdexcept>
#include <string>

namespace reebflow {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: non-finite arguments, range and sector errors, parameter
// constraints that do not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A named structural invariant failed on sampled points.
class InvariantViolation : public DomainError {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : DomainError(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

// A solver could not produce an answer: bracket failures, limit divergence,
// exhausted depth budgets.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace reebflow
