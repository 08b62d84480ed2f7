#include "cpm/error.hpp"

namespace cpm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorKind::NoUncensoredValues: return "NoUncensoredValues";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InternalAssignmentError: return "InternalAssignmentError";
    case ErrorKind::NonIncreasingAlphas: return "NonIncreasingAlphas";
    case ErrorKind::NonFiniteLikelihood: return "NonFiniteLikelihood";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::SingularInformation: return "SingularInformation";
    case ErrorKind::NonIncreasingAlphasUnrecoverable: return "NonIncreasingAlphasUnrecoverable";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::MismatchedData: return "MismatchedData";
    case ErrorKind::NonBinaryCovariate: return "NonBinaryCovariate";
    case ErrorKind::UnsupportedCensoring: return "UnsupportedCensoring";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedLink: return "UnsupportedLink";
    case ErrorKind::NonPositiveOutcome: return "NonPositiveOutcome";
    case ErrorKind::MultipleDLsUnsupported: return "MultipleDLsUnsupported";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::Io: return "Io";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownCensorCode: return "UnknownCensorCode";
    case ErrorKind::UnknownProfileColumn: return "UnknownProfileColumn";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace cpm
