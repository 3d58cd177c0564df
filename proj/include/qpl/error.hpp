#pragma once

#include <stdexcept>
#include <string>

namespace qpl {

/// Failure categories surfaced by the library. The CLI maps every one of
/// these to exit status 1 and prints the message verbatim.
enum class ErrorKind {
  DomainMismatch,
  InvalidArgument,
  Degenerate,
  ZeroForm,
  NotNormalizable,
  NonIntegral,
  Tolerance,
  Unbounded,
  Infeasible,
  Parse,
};

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

}  // namespace qpl
