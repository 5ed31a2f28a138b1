#pragma once

#include <stdexcept>
#include <string>

namespace dwsyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class RelaxationFailure : public Error {
 public:
  RelaxationFailure(const std::string& what, double residual_torque)
      : Error(what), residual_torque_(residual_torque) {}
  double residual_torque() const { return residual_torque_; }

 private:
  double residual_torque_;
};

/// Raised when an observable needs a domain wall but the wire is saturated.
class SaturatedState : public Error {
 public:
  using Error::Error;
};

class BoundaryHit : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class StuckDevice : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateFeature : public Error {
 public:
  DegenerateFeature(const std::string& feature)
      : Error("degenerate feature (constant on the train split): " + feature), feature_(feature) {}
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

class UndefinedAngle : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace dwsyn
