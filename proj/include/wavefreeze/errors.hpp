#pragma once

#include <stdexcept>
#include <string>

namespace wavefreeze {

/// Failure categories; each maps onto one C API status code and one CLI exit code.
enum class ErrorKind {
  Precondition,  // caller passed arguments outside the documented contract
  Domain,        // argument outside the mathematical domain (e.g. u outside [0,1] for tabulated f)
  Numeric,       // integrator/solver breakdown: step underflow, NaN, non-convergence
  NoSolution,    // bracket or root-find failure; the requested object does not exist numerically
  Degenerate,    // vanishing gradient norm in a speed functional
  Config,        // malformed configuration
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::Precondition, what);
}

}  // namespace wavefreeze
