#include "stargraph/error.hpp"

namespace stargraph {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AllZero: return "ALL_ZERO";
    case ErrorCode::CemeteryArg: return "CEMETERY_ARG";
    case ErrorCode::Divergent: return "DIVERGENT";
    case ErrorCode::QuadratureFail: return "QUADRATURE_FAIL";
    case ErrorCode::BadStep: return "BAD_STEP";
    case ErrorCode::NeedsCutoff: return "NEEDS_CUTOFF";
    case ErrorCode::BeyondHorizon: return "BEYOND_HORIZON";
    case ErrorCode::HorizonExhausted: return "HORIZON_EXHAUSTED";
    case ErrorCode::InadmissibleWeights: return "INADMISSIBLE_WEIGHTS";
    case ErrorCode::InfiniteP4: return "INFINITE_P4";
    case ErrorCode::ZeroDenominator: return "ZERO_DENOMINATOR";
    case ErrorCode::SchemaError: return "SCHEMA_ERROR";
    case ErrorCode::SegmentLimit: return "SEGMENT_LIMIT";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace stargraph
