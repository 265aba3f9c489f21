#include "hybridpower/error.hpp"

namespace hybridpower {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "invalid_argument";
    case ErrorCode::DegenerateConditional:
      return "degenerate_conditional";
    case ErrorCode::Infeasible:
      return "infeasible";
    case ErrorCode::ExceedsNMax:
      return "exceeds_n_max";
  }
  return "unknown";
}

}  // namespace hybridpower
