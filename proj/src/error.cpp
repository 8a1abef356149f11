#include "nlb/error.hpp"

namespace nlb {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::floor_breach: return "floor_breach";
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace nlb
