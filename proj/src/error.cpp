#include "ruelle/error.hpp"

namespace ruelle {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::index_out_of_family: return "index-out-of-family";
    case ErrorCode::domain: return "domain-error";
    case ErrorCode::unbounded_distortion: return "unbounded-distortion";
    case ErrorCode::summability: return "summability";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::irreducibility_failure: return "irreducibility-failure";
    case ErrorCode::theta_unknown: return "theta-unknown";
    case ErrorCode::no_root_in_range: return "no-root-in-range";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::config: return "config-error";
  }
  return "unknown";
}

}  // namespace ruelle
