#pragma once

#include <stdexcept>
#include <string>

namespace tpfem {

enum class ErrorKind {
  parameter,   // argument outside its admissible domain
  validation,  // problem violates a structural assumption
  mesh,        // degenerate or non-monotone mesh
  solver,      // singular pivot during factorization
  regression,  // reference comparison failed or incomplete
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code used by the command line harness for an error kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::validation:
      return 2;
    case ErrorKind::mesh:
    case ErrorKind::solver:
      return 3;
    case ErrorKind::regression:
      return 4;
    case ErrorKind::io:
      return 1;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tpfem
