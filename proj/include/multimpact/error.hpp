#pragma once

#include <stdexcept>
#include <string>

namespace multimpact {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kNotPositiveDefinite,
  kSolverFailure,
  kConeViolation,
  kNonDegeneracyViolation,
  kIterationCap,
  kBudgetExceeded,
  kAsymmetricScene,
  kUnsupported,
  kParse,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace multimpact
