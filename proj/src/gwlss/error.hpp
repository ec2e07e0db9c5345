#pragma once

#include <stdexcept>
#include <string>

namespace gwlss {

enum class ErrorKind {
  InvalidArgument,
  Config,
  Numerical,
  Io,
};

// Every failure raised by the core library carries a kind, which the C API
// maps onto its status codes and the CLI onto exit codes.
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

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace gwlss
