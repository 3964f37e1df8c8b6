#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace caprsoc {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch,
  Unsupported,
  InternalInconsistency,
  StepFailure,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace caprsoc
