#pragma once

#include <stdexcept>
#include <string>

namespace furstlab {

enum class ErrorKind {
  InvalidArgument = 1,
  Domain = 2,
  Evaluation = 3,
  IdenticalCurves = 4,
  Parameter = 5,
  Invariant = 6,
  Io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace furstlab
