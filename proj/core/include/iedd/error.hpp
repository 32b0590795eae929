#pragma once

#include <stdexcept>
#include <string>

namespace iedd {

enum class ErrorCode {
  InvalidParameter,
  Dimension,
  Singularity,
  Resource,
  Breakdown,
  Divergence,
  NonConvergence,
  InvalidPartition,
  Coverage,
  UnsupportedLayout,
  Placement,
  Size,
  UndefinedResidual,
  Io,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

// Base of every exception thrown by the library. The code lets callers (the
// CLI in particular) map failures to exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace iedd
