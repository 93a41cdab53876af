#pragma once

#include <stdexcept>
#include <string>

namespace klmap {

/// Two GridFunctions (or a function and an operator) live on different grids.
class GridMismatchError : public std::invalid_argument {
 public:
  explicit GridMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

/// Evaluation point outside [a, b].
class OutOfDomainError : public std::invalid_argument {
 public:
  explicit OutOfDomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Vector/matrix sizes inconsistent with the operation (e.g. n > rank).
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Function not representable in the retained eigenspan, i.e. outside the
/// discrete Cameron-Martin range where Q^{-1/2} is invertible.
class NotInRangeError : public std::runtime_error {
 public:
  explicit NotInRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// A dense factorization or eigensolve failed to converge.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Armijo backtracking underflowed the step before sufficient decrease.
class LineSearchError : public std::runtime_error {
 public:
  explicit LineSearchError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation required a converged Solution but got converged == false.
class NotConvergedError : public std::runtime_error {
 public:
  explicit NotConvergedError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file rejected; message carries the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace klmap
