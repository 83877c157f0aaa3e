#include "multimpact/error.hpp"

namespace multimpact {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNotPositiveDefinite: return "not positive definite";
    case ErrorCode::kSolverFailure: return "solver failure";
    case ErrorCode::kConeViolation: return "cone violation";
    case ErrorCode::kNonDegeneracyViolation: return "non-degeneracy violation";
    case ErrorCode::kIterationCap: return "iteration cap";
    case ErrorCode::kBudgetExceeded: return "budget exceeded";
    case ErrorCode::kAsymmetricScene: return "asymmetric scene";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace multimpact
