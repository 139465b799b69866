#pragma once

#include <stdexcept>
#include <string>

namespace pamexo {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDomain,
  kUnreachablePressure,
  kSolver,
  kIterationLimit,
  kIllConditioned,
  kParse,
  kIo,
  kScenario,
  kSegmentation,
  kFilterDesign,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code drives exit-status and
/// C API mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pamexo
