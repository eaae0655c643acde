#pragma once

#include <stdexcept>
#include <string>

namespace cyclorank {

enum class ErrorCode {
  SingularModel,
  PointNotOnCurve,
  BadReduction,
  DivisionByZero,
  PrecisionExhausted,
  NotAUnit,
  ZeroArgument,
  SupersingularPrime,
  TorsionPoint,
  RankZero,
  PrecisionInsufficient,
  NegativeValuation,
  BadPrime,
  ParseError,
  ValidationError,
  NetworkError,
  NotFound,
  SchemaMismatch,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cyclorank
