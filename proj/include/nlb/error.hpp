#ifndef NLB_ERROR_HPP_
#define NLB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlb {

enum class ErrorKind {
  invalid_argument,     // bad parameters or malformed input
  precondition,         // input outside the documented operating range
  floor_breach,         // iterate collapsed below the positivity floor
  invariant_violation,  // discrete scheme broke a monotonicity/ordering bound
  non_finite,           // NaN or Inf appeared in a computation
  no_convergence,       // a quadrature or search failed to converge
  io,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlb

#endif  // NLB_ERROR_HPP_
