#include "wavefreeze/errors.hpp"

namespace wavefreeze {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Precondition:
      return "precondition";
    case ErrorKind::Domain:
      return "domain";
    case ErrorKind::Numeric:
      return "numeric";
    case ErrorKind::NoSolution:
      return "no_solution";
    case ErrorKind::Degenerate:
      return "degenerate";
    case ErrorKind::Config:
      return "config";
    case ErrorKind::Io:
      return "io";
  }
  return "unknown";
}

}  // namespace wavefreeze
