#pragma once

#include <stdexcept>
#include <string>

namespace rollkit {

enum class ErrorCode {
  kDomain = 1,      // argument outside the mathematical domain of an operation
  kInvalidInput,    // malformed or inconsistent input (scenario fields, sizes)
  kNumerical,       // an iterative method failed to converge
  kIo,
  kCertification,   // a precondition certificate (lambda-convexity, sec >= c) is missing
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rollkit
