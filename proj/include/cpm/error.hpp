#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpm {

enum class ErrorKind {
  // dataset / anchors
  EmptyData,
  InconsistentDimensions,
  NoUncensoredValues,
  NonFiniteValue,
  InternalAssignmentError,
  // likelihood / solver
  NonIncreasingAlphas,
  NonFiniteLikelihood,
  NotConverged,
  SingularInformation,
  NonIncreasingAlphasUnrecoverable,
  // inference / derived quantities
  NotNested,
  MismatchedData,
  NonBinaryCovariate,
  UnsupportedCensoring,
  InvalidProbability,
  InvalidArgument,
  UnsupportedLink,
  // comparators
  NonPositiveOutcome,
  MultipleDLsUnsupported,
  // simulation
  UnknownScenario,
  // io
  Io,
  ParseError,
  UnknownCensorCode,
  UnknownProfileColumn,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

// Every library failure is reported through this type; `kind()` is stable and
// machine readable, `what()` carries the human-oriented detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cpm
