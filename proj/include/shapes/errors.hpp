#pragma once

#include <stdexcept>
#include <string>

namespace shapes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Knot sequence violates ordering, multiplicity or length requirements.
class KnotError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the knot span.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Least-squares problem has too few samples or inconsistent dimensions.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

/// Normal-equation matrix is singular even after diagonal jitter.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Interior knots cannot be dispersed to one per predictor interval.
class UnhealableError : public Error {
 public:
  using Error::Error;
};

/// Every PSO evaluation for a model (or every model) returned infinite fitness.
class ModelFitError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace shapes
