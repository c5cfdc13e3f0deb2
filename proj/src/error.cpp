#include "framelab/error.hpp"

namespace framelab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotParseval: return "NotParseval";
    case ErrorCode::NoComplement: return "NoComplement";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::NotUnitNorm: return "NotUnitNorm";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::IndivisibleRepeat: return "IndivisibleRepeat";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::RankZero: return "RankZero";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::NegativeChordal: return "NegativeChordal";
    case ErrorCode::NotAuerbach: return "NotAuerbach";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace framelab
