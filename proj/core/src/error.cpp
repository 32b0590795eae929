#include "iedd/error.hpp"

namespace iedd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::Resource: return "resource";
    case ErrorCode::Breakdown: return "numerical-breakdown";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::InvalidPartition: return "invalid-partition";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::UnsupportedLayout: return "unsupported-layout";
    case ErrorCode::Placement: return "placement";
    case ErrorCode::Size: return "size";
    case ErrorCode::UndefinedResidual: return "undefined-residual";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace iedd
