#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parisian {

enum class ErrorCode {
  Io,
  Parse,
  Schema,
  DimensionMismatch,
  NotSymmetric,
  NotPositiveDefinite,
  SingularFactor,
  NonPositiveDrift,
  NonPositiveAlpha,
  InvalidArgument,
  NoEssentialSet,
  BracketNotFound,
  Numerical,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace parisian
