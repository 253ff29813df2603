// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace bdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before meeting its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_iterate, double best_value)
      : Error(what), best_iterate_(best_iterate), best_value_(best_value) {}

  double best_iterate() const noexcept { return best_iterate_; }
  double best_value() const noexcept { return best_value_; }

 private:
  double best_iterate_;
  double best_value_;
};

/// Adaptive quadrature hit its depth limit before meeting the tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// A request would exceed the configured memory cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An operation was called in a mode where its result has no meaning.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdp
