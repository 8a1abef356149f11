// Small quadrature helpers shared by the kernel, convolution and wave code.

#ifndef NLB_QUADRATURE_HPP_
#define NLB_QUADRATURE_HPP_

#include <functional>
#include <span>

namespace nlb::quad {

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) on [a, b], split at every breakpoint that
// falls strictly inside the interval. Throws Error(no_convergence) if the
// estimated error exceeds max(abs_tol, rel_tol * L1) after max_depth
// bisections.
double adaptive(const Integrand& f, double a, double b,
                std::span<const double> breakpoints = {},
                double rel_tol = 1e-13, double abs_tol = 1e-15,
                unsigned max_depth = 30);

// Fixed 8-point Gauss-Legendre on each smooth piece of [a, b].
template <class F>
double gauss8(const F& f, double a, double b,
              std::span<const double> breakpoints = {});

namespace detail {
inline constexpr double kGaussX[4] = {
    0.1834346424956498049394761, 0.5255324099163289858177390,
    0.7966664774136267395915539, 0.9602898564975362316835609};
inline constexpr double kGaussW[4] = {
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

template <class F>
double gauss8_piece(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double dx = half * kGaussX[k];
    sum += kGaussW[k] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}
}  // namespace detail

template <class F>
double gauss8(const F& f, double a, double b,
              std::span<const double> breakpoints) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double left = a;
  for (double bp : breakpoints) {
    if (bp <= left) continue;
    if (bp >= b) break;
    total += detail::gauss8_piece(f, left, bp);
    left = bp;
  }
  return total + detail::gauss8_piece(f, left, b);
}

}  // namespace nlb::quad

#endif  // NLB_QUADRATURE_HPP_
