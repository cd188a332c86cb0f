#pragma once

#include <stdexcept>
#include <string>

namespace treevote {

// Numeric values double as CLI exit codes for the pipeline.
enum class ErrorCode : int {
  Config = 1,
  DataLoad = 2,
  Degenerate = 3,
  OutputWrite = 4,
  InvalidArgument = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace treevote
