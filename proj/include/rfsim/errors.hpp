#pragma once

#include <stdexcept>
#include <string>

namespace rfsim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Molar sum (or total mass fraction) below the degeneracy threshold.
class DegenerateComposition : public Error {
 public:
  using Error::Error;
};

// A solve that needs Y_i > delta for every species was handed a vanishing one.
class NotStrictlyPositive : public Error {
 public:
  using Error::Error;
};

// Input outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Post-step state violated a positivity or sum-to-one tolerance.
class StepRejected : public Error {
 public:
  using Error::Error;
};

class PoissonSolveFailed : public Error {
 public:
  using Error::Error;
};

// A rate model failed one of its admissibility checks.
class ModelRejected : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfsim
