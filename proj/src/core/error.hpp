#pragma once

#include <stdexcept>
#include <string>

namespace nas {

enum class ErrorCode {
  kInvalidInput,
  kParse,
  kValidation,
  kNodeBudget,
  kNoSolution,
  kIo,
  kDegenerateOperand,
  kInfeasible,
};

// Every failure raised by the core carries one of the codes above; the C API
// maps them one-to-one onto nas_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nas
