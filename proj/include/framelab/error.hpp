#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace framelab {

enum class ErrorCode {
  ShapeMismatch,
  AsymmetricInput,
  SingularOperator,
  InvalidArgument,
  ZeroVector,
  NotParseval,
  NoComplement,
  UnsupportedShape,
  NotUnitNorm,
  StepTooLarge,
  IndivisibleRepeat,
  NotIdempotent,
  NotSelfAdjoint,
  RankZero,
  RankMismatch,
  NegativeChordal,
  NotAuerbach,
  Infeasible,
  NoConvergence,
  UnsupportedExponent,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every domain failure in the library is reported through this type; the
// code is stable and the message carries the offending index or value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace framelab
