#pragma once

#include <stdexcept>
#include <string>

namespace survtree {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain (empty data, zero divisor).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A leaf whose hazard sum is zero has no maximum-likelihood theta.
class DegenerateLeafError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Tree or feature-vector shape mismatch.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Malformed input files, rows or columns.
class DataError : public Error {
 public:
  using Error::Error;
};

// Solver cache does not hold what reconstruction expects.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for its input (no comparable pairs, zero weights).
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace survtree
