#pragma once

#include <stdexcept>
#include <string>

namespace qkdv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class EvaluationError : public Error { using Error::Error; };
class EllipticityError : public Error { using Error::Error; };
class AssumptionError : public Error { using Error::Error; };
class TimeDirectionError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };
class DecompositionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class InconclusiveRateError : public Error { using Error::Error; };
class UsageError : public Error { using Error::Error; };

// Raised when a time stepper or fixed point iteration produces non-finite
// values; carries the step index at which this was detected.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Picard iteration stopped contracting.
class ContractionError : public Error { using Error::Error; };

}  // namespace qkdv
