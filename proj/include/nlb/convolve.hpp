// Discrete convolution with the kernel K on the half line (odd functions)
// and on a bounded interval with constant far-field states.
//
// Fields are represented by their piecewise-linear interpolant between
// nodes, extended by constants outside the sampled interval. The kernel is
// integrated exactly against each hat function (product trapezoid rule), so
// kinks and jumps of K never fall "between" quadrature points, and the part
// of the integral outside the sampled interval is added in closed form from
// the cumulative mass Phi.

#ifndef NLB_CONVOLVE_HPP_
#define NLB_CONVOLVE_HPP_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nlb/kernel.hpp"

namespace nlb {

// Uniform nodes x_i = -L + i h, i = 0..N, on the truncated half line
// (-L, 0]; x_0 = -L and x_N = 0 exactly.
class HalfLineGrid {
 public:
  HalfLineGrid(double length, int cells);

  double length() const { return length_; }
  int cells() const { return cells_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(cells_) + 1; }

  double node(int i) const {
    if (i == cells_) return 0.0;
    if (i == 0) return -length_;
    return -length_ + i * spacing_;
  }
  std::vector<double> nodes() const;

 private:
  double length_;
  int cells_;
  double spacing_;
};

// Samples of a function on (-L, 0]; u == far_field is implied for x <= -L.
// The sample at x = 0 is the left limit u(0-).
struct HalfLineField {
  HalfLineGrid grid;
  std::vector<double> values;
  double far_field = 0.0;

  HalfLineField(HalfLineGrid g, std::vector<double> v, double far)
      : grid(g), values(std::move(v)), far_field(far) {}

  // Piecewise-linear interpolant on (-inf, 0].
  double operator()(double x) const;

  // 0 < u_i <= far_field + tol (the node at 0 may vanish) and u nonincreasing.
  bool admissible(double tol = 1e-12) const;
};

enum class ConvolutionPath { direct, fft };

namespace detail {
class ToeplitzBank;
}

// Evaluates (K*u)(x_i) for the odd extension of a half-line field:
//   (K*u)(x) = int_{-inf}^0 [K(x-y) - K(x+y)] u(y) dy.
// Weights depend only on the kernel and the grid, so one convolver serves a
// whole iteration. apply() is const and safe to call from several threads.
class OddConvolver {
 public:
  OddConvolver(const Kernel& kernel, const HalfLineGrid& grid,
               ConvolutionPath path = ConvolutionPath::fft);
  ~OddConvolver();
  OddConvolver(OddConvolver&&) noexcept;
  OddConvolver& operator=(OddConvolver&&) noexcept;

  const HalfLineGrid& grid() const { return grid_; }
  const Kernel& kernel() const { return kernel_; }

  std::vector<double> apply(std::span<const double> u, double far_field) const;
  std::vector<double> apply_direct(std::span<const double> u, double far_field) const;
  std::vector<double> apply_fft(std::span<const double> u, double far_field) const;

  // Integral of K(x_i - y) - K(x_i + y) against hat j (used by tests).
  double weight(int i, int j) const;

 private:
  double r(int m) const { return half_hat_[static_cast<std::size_t>(m + 2 * grid_.cells())]; }
  double w(int m) const { return hat_[static_cast<std::size_t>(m + 2 * grid_.cells())]; }
  void finalize(std::vector<double>& out, std::span<const double> u, double far_field) const;

  Kernel kernel_;
  HalfLineGrid grid_;
  ConvolutionPath path_;
  std::vector<double> half_hat_;  // r(m), m in [-2N, 2N]
  std::vector<double> hat_;       // r(m) + r(-m)
  std::vector<double> tail_;      // mass of K(x_i - .) - K(x_i + .) on (-inf, -L)
  std::unique_ptr<detail::ToeplitzBank> bank_;
};

// Convolution on uniform nodes x_j = a + j h (j = 0..n) of a field equal to
// u_left for x < a and u_right for x > b. Each row of the discrete operator
// sums to one, so constants are reproduced to rounding.
class FullLineConvolver {
 public:
  FullLineConvolver(const Kernel& kernel, double a, double b, int cells,
                    ConvolutionPath path = ConvolutionPath::fft);
  ~FullLineConvolver();
  FullLineConvolver(FullLineConvolver&&) noexcept;
  FullLineConvolver& operator=(FullLineConvolver&&) noexcept;

  std::vector<double> apply(std::span<const double> u, double u_left, double u_right) const;

  double a() const { return a_; }
  double b() const { return b_; }
  int cells() const { return cells_; }

 private:
  double r(int m) const { return half_hat_[static_cast<std::size_t>(m + cells_)]; }

  Kernel kernel_;
  double a_, b_, h_;
  int cells_;
  ConvolutionPath path_;
  std::vector<double> half_hat_;  // r(m), m in [-n, n]
  std::vector<double> hat_;
  std::vector<double> left_tail_, right_tail_, scale_;
  std::unique_ptr<detail::ToeplitzBank> bank_;
};

// int_0^h K(offset - z) (1 - z/h) dz, split at the kernel's breakpoints.
double half_hat_weight(const Kernel& kernel, double offset, double h);

std::vector<double> odd_convolve(const Kernel& kernel, const HalfLineField& field);

std::vector<double> full_line_convolve(const Kernel& kernel, double a, double b,
                                       std::span<const double> u, double u_left,
                                       double u_right);

// Independent adaptive-quadrature evaluation of the odd convolution at one
// point. u is evaluated on (-L, 0]; kinks lists abscissae where u is not
// smooth. Throws Error(no_convergence) after 24 bisection levels.
double brute_force_convolve(const Kernel& kernel, const std::function<double(double)>& u,
                            double far_field, double length, double x,
                            std::span<const double> kinks = {});
double brute_force_convolve(const Kernel& kernel, const HalfLineField& field, double x);

}  // namespace nlb

#endif  // NLB_CONVOLVE_HPP_
