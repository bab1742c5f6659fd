#pragma once

#include <stdexcept>
#include <string>

namespace monowrap {

enum class ErrorKind {
  kInvalidArgument,
  kDomainMismatch,
  kEmptySample,
  kInvalidArity,
  kInvalidConfig,
  kBudgetExceeded,
  kLearnerFailure,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so the
// C API can map it onto a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace monowrap
