#pragma once

#include <stdexcept>
#include <string>

namespace toricflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad specs, size mismatches, missing files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A point outside the open polytope was handed to a closed-form evaluation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The discretization cannot produce a value: singular matrices, stencils
/// that do not fit in the node set.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Valid input that a particular operation does not handle (e.g. separable
/// machinery on a non-tensor grid).
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace toricflow
