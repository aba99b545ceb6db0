#include "wulfflab/errors.hpp"

namespace wulfflab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonUnitInput: return "NonUnitInput";
    case ErrorKind::DerivativeFailure: return "DerivativeFailure";
    case ErrorKind::ConvexityViolation: return "ConvexityViolation";
    case ErrorKind::ZeroT: return "ZeroT";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateTranslation: return "DegenerateTranslation";
    case ErrorKind::ZeroCurvature: return "ZeroCurvature";
    case ErrorKind::LeafDrift: return "LeafDrift";
    case ErrorKind::NotIsoparametric: return "NotIsoparametric";
    case ErrorKind::AntipodeNotFound: return "AntipodeNotFound";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonUnitInput:
    case ErrorKind::ZeroT:
    case ErrorKind::ZeroCurvature:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Parse:
      return true;
    default:
      return false;
  }
}

}  // namespace wulfflab
