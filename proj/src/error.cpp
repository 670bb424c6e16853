#include "parisian/error.hpp"

namespace parisian {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NotSymmetric: return "not_symmetric";
    case ErrorCode::NotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::SingularFactor: return "singular_factor";
    case ErrorCode::NonPositiveDrift: return "non_positive_drift";
    case ErrorCode::NonPositiveAlpha: return "non_positive_alpha";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NoEssentialSet: return "no_essential_set";
    case ErrorCode::BracketNotFound: return "bracket_not_found";
    case ErrorCode::Numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace parisian
