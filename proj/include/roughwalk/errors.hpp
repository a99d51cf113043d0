#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughwalk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally malformed model (bad indices, negative probabilities, shape mismatch).
class ModelError : public Error {
 public:
  using Error::Error;
};

class NotStochastic : public Error {
 public:
  NotStochastic(std::size_t cell, double sum);
  std::size_t cell;
  double sum;
};

class NotIrreducible : public Error {
 public:
  explicit NotIrreducible(std::vector<std::vector<std::size_t>> classes);
  std::vector<std::vector<std::size_t>> classes;
};

class DegenerateCovariance : public Error {
 public:
  DegenerateCovariance(std::size_t rank, std::size_t dim);
  std::size_t rank;
  std::size_t dim;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class InsufficientCount : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got);
};

/// A simulated state left the finite range; `step` is where it happened.
class NonFinite : public Error {
 public:
  NonFinite(std::size_t step, double value);
  std::size_t step;
  double value;
};

class SingularStep : public Error {
 public:
  using Error::Error;
};

}  // namespace roughwalk
