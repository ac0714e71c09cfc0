#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must live on the same mesh do not.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("grid mismatch") {}
};

/// A tridiagonal factorization met a pivot below the breakdown tolerance.
class SingularPivot : public Error {
 public:
  SingularPivot(std::size_t index, double pivot)
      : Error("near-singular pivot " + std::to_string(pivot) + " at index " +
              std::to_string(index)),
        index_(index),
        pivot_(pivot) {}

  std::size_t index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t index_;
  double pivot_;
};

/// Iterative solver did not converge.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace hetflow
