#include "nlb/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlb/error.hpp"
#include "nlb/format.hpp"
#include "nlb/quadrature.hpp"
#include "toeplitz_fft.hpp"

namespace nlb {

HalfLineGrid::HalfLineGrid(double length, int cells) : length_(length), cells_(cells) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::invalid_argument, "half-line length L must be positive and finite");
  }
  if (cells < 64) {
    throw Error(ErrorKind::invalid_argument,
                "half-line grid needs at least 64 cells, got " + std::to_string(cells));
  }
  spacing_ = length / cells;
}

std::vector<double> HalfLineGrid::nodes() const {
  std::vector<double> x(size());
  for (int i = 0; i <= cells_; ++i) x[static_cast<std::size_t>(i)] = node(i);
  return x;
}

double HalfLineField::operator()(double x) const {
  const double length = grid.length();
  if (x <= -length) return far_field;
  if (x >= 0.0) return values.back();
  const int n = grid.cells();
  int j = static_cast<int>(std::floor((x + length) / grid.spacing()));
  j = std::clamp(j, 0, n - 1);
  const double x0 = grid.node(j);
  const double t = (x - x0) / (grid.node(j + 1) - x0);
  return values[static_cast<std::size_t>(j)] +
         t * (values[static_cast<std::size_t>(j + 1)] - values[static_cast<std::size_t>(j)]);
}

bool HalfLineField::admissible(double tol) const {
  if (values.size() != grid.size()) return false;
  const std::size_t n = values.size() - 1;
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v > far_field + tol) return false;
    if (i < n ? !(v > 0.0) : v < 0.0) return false;
    if (i < n && values[i + 1] > v + tol) return false;
  }
  return true;
}

double half_hat_weight(const Kernel& kernel, double offset, double h) {
  if (auto support = kernel.support_radius()) {
    if (offset - h >= *support || offset <= -*support) return 0.0;
  }
  // Kernel breakpoints b in (offset - h, offset) map to z = offset - b.
  const auto& breaks = kernel.breakpoints();
  const auto lo = std::upper_bound(breaks.begin(), breaks.end(), offset - h);
  const auto hi = std::lower_bound(lo, breaks.end(), offset);
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = hi; it != lo;) {
    --it;
    cuts.push_back(offset - *it);
  }
  const double inv_h = 1.0 / h;
  return quad::gauss8(
      [&](double z) { return kernel.density(offset - z) * (1.0 - z * inv_h); }, 0.0, h, cuts);
}

// --- OddConvolver -----------------------------------------------------------

OddConvolver::OddConvolver(const Kernel& kernel, const HalfLineGrid& grid, ConvolutionPath path)
    : kernel_(kernel), grid_(grid), path_(path) {
  const int n = grid.cells();
  const double h = grid.spacing();
  const double length = grid.length();
  if (kernel.cdf(-length) > 1e-10) {
    std::ostringstream msg;
    msg << "kernel tail mass beyond L = " << length << " is " << kernel.cdf(-length)
        << " (> 1e-10); enlarge L";
    throw Error(ErrorKind::precondition, msg.str());
  }

  half_hat_.resize(static_cast<std::size_t>(4 * n + 1));
  for (int m = -2 * n; m <= 2 * n; ++m) {
    half_hat_[static_cast<std::size_t>(m + 2 * n)] = half_hat_weight(kernel, m * h, h);
  }
  hat_.resize(half_hat_.size());
  for (int m = -2 * n; m <= 2 * n; ++m) {
    hat_[static_cast<std::size_t>(m + 2 * n)] = r(m) + r(-m);
  }
  tail_.resize(grid.size());
  for (int i = 0; i <= n; ++i) {
    tail_[static_cast<std::size_t>(i)] = kernel.cdf(-i * h) - kernel.cdf(i * h - 2.0 * length);
  }

  if (path_ == ConvolutionPath::fft) {
    std::vector<double> toeplitz(static_cast<std::size_t>(2 * n + 1));
    std::vector<double> hankel(toeplitz.size());
    for (int m = -n; m <= n; ++m) {
      toeplitz[static_cast<std::size_t>(m + n)] = w(m);
      hankel[static_cast<std::size_t>(m + n)] = -w(m - n);
    }
    bank_ = std::make_unique<detail::ToeplitzBank>(
        n, std::vector<std::vector<double>>{toeplitz, hankel});
  }
}

OddConvolver::~OddConvolver() = default;
OddConvolver::OddConvolver(OddConvolver&&) noexcept = default;
OddConvolver& OddConvolver::operator=(OddConvolver&&) noexcept = default;

double OddConvolver::weight(int i, int j) const {
  const int n = grid_.cells();
  double value = w(i - j) - w(i + j - 2 * n);
  if (j == n) value -= r(i - n) - r(n - i);
  if (j == 0) value -= r(-i) - r(i - 2 * n);
  return value;
}

void OddConvolver::finalize(std::vector<double>& out, std::span<const double> u,
                            double far_field) const {
  const int n = grid_.cells();
  const double u0 = u.front();
  const double un = u.back();
  for (int i = 0; i < n; ++i) {
    auto& g = out[static_cast<std::size_t>(i)];
    g -= un * (r(i - n) - r(n - i));
    g -= u0 * (r(-i) - r(i - 2 * n));
    g += far_field * tail_[static_cast<std::size_t>(i)];
  }
  // Odd field, even kernel: the convolution vanishes at the origin.
  out[static_cast<std::size_t>(n)] = 0.0;
}

std::vector<double> OddConvolver::apply(std::span<const double> u, double far_field) const {
  return path_ == ConvolutionPath::fft ? apply_fft(u, far_field) : apply_direct(u, far_field);
}

std::vector<double> OddConvolver::apply_direct(std::span<const double> u, double far_field) const {
  if (u.size() != grid_.size()) {
    throw Error(ErrorKind::invalid_argument, "odd_convolve: field size does not match grid");
  }
  const int n = grid_.cells();
  std::vector<double> out(grid_.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
      sum += u[static_cast<std::size_t>(j)] * (w(i - j) - w(i + j - 2 * n));
    }
    out[static_cast<std::size_t>(i)] = sum;
  }
  finalize(out, u, far_field);
  return out;
}

std::vector<double> OddConvolver::apply_fft(std::span<const double> u, double far_field) const {
  if (u.size() != grid_.size()) {
    throw Error(ErrorKind::invalid_argument, "odd_convolve: field size does not match grid");
  }
  if (!bank_) return apply_direct(u, far_field);
  std::vector<double> reversed(u.rbegin(), u.rend());
  const std::span<const double> inputs[2] = {u, reversed};
  std::vector<double> out = bank_->apply(inputs);
  finalize(out, u, far_field);
  return out;
}

std::vector<double> odd_convolve(const Kernel& kernel, const HalfLineField& field) {
  if (!field.admissible(1e-12)) {
    throw Error(ErrorKind::invalid_argument,
                "odd_convolve: field is not admissible (positive, nonincreasing, <= far field)");
  }
  const OddConvolver conv(kernel, field.grid);
  return conv.apply(field.values, field.far_field);
}

// --- FullLineConvolver ------------------------------------------------------

FullLineConvolver::FullLineConvolver(const Kernel& kernel, double a, double b, int cells,
                                     ConvolutionPath path)
    : kernel_(kernel), a_(a), b_(b), h_((b - a) / cells), cells_(cells), path_(path) {
  if (!(b > a) || cells < 2) {
    throw Error(ErrorKind::invalid_argument, "full-line convolution needs a < b and >= 2 cells");
  }
  const double needed = 2.0 * kernel.tail_radius(1e-10);
  if (b - a < needed) {
    std::ostringstream msg;
    msg << "domain length " << (b - a) << " is shorter than " << needed
        << " (twice the kernel's 1e-10 mass radius)";
    throw Error(ErrorKind::precondition, msg.str());
  }
  const int n = cells;
  half_hat_.resize(static_cast<std::size_t>(2 * n + 1));
  for (int m = -n; m <= n; ++m) {
    half_hat_[static_cast<std::size_t>(m + n)] = half_hat_weight(kernel, m * h_, h_);
  }
  hat_.resize(half_hat_.size());
  for (int m = -n; m <= n; ++m) hat_[static_cast<std::size_t>(m + n)] = r(m) + r(-m);

  // Prefix sums of the hat weights give the interior row sums in O(n).
  std::vector<double> prefix(hat_.size() + 1, 0.0);
  for (std::size_t k = 0; k < hat_.size(); ++k) prefix[k + 1] = prefix[k] + hat_[k];

  left_tail_.resize(static_cast<std::size_t>(n) + 1);
  right_tail_.resize(left_tail_.size());
  scale_.resize(left_tail_.size());
  for (int i = 0; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    left_tail_[k] = kernel.cdf(-i * h_);
    right_tail_[k] = kernel.cdf((i - n) * h_);
    // sum_{j=0}^{n} w(i-j) = sum_{m=i-n}^{i} w(m)
    const double row = prefix[static_cast<std::size_t>(i + n + 1)] -
                       prefix[static_cast<std::size_t>(i)] - r(i - n) - r(-i);
    scale_[k] = row > 0.0 ? (1.0 - left_tail_[k] - right_tail_[k]) / row : 0.0;
  }

  if (path_ == ConvolutionPath::fft) {
    bank_ = std::make_unique<detail::ToeplitzBank>(n, std::vector<std::vector<double>>{hat_});
  }
}

FullLineConvolver::~FullLineConvolver() = default;
FullLineConvolver::FullLineConvolver(FullLineConvolver&&) noexcept = default;
FullLineConvolver& FullLineConvolver::operator=(FullLineConvolver&&) noexcept = default;

std::vector<double> FullLineConvolver::apply(std::span<const double> u, double u_left,
                                             double u_right) const {
  const int n = cells_;
  if (u.size() != static_cast<std::size_t>(n) + 1) {
    throw Error(ErrorKind::invalid_argument, "full_line_convolve: field size does not match grid");
  }
  std::vector<double> out;
  if (bank_) {
    const std::span<const double> inputs[1] = {u};
    out = bank_->apply(inputs);
  } else {
    out.assign(u.size(), 0.0);
    for (int i = 0; i <= n; ++i) {
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) sum += u[static_cast<std::size_t>(j)] * hat_[static_cast<std::size_t>(i - j + n)];
      out[static_cast<std::size_t>(i)] = sum;
    }
  }
  const double u0 = u.front();
  const double un = u.back();
  for (int i = 0; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double interior = out[k] - un * r(i - n) - u0 * r(-i);
    out[k] = scale_[k] * interior + u_left * left_tail_[k] + u_right * right_tail_[k];
  }
  return out;
}

std::vector<double> full_line_convolve(const Kernel& kernel, double a, double b,
                                       std::span<const double> u, double u_left,
                                       double u_right) {
  if (u.size() < 3) throw Error(ErrorKind::invalid_argument, "full_line_convolve: too few samples");
  const FullLineConvolver conv(kernel, a, b, static_cast<int>(u.size()) - 1);
  return conv.apply(u, u_left, u_right);
}

// --- brute force ------------------------------------------------------------

double brute_force_convolve(const Kernel& kernel, const std::function<double(double)>& u,
                            double far_field, double length, double x,
                            std::span<const double> kinks) {
  const double reach = kernel.support_radius().value_or(kernel.tail_radius(1e-17));
  const double lower = std::min(-length, x) - reach;
  std::vector<double> cuts(kinks.begin(), kinks.end());
  cuts.push_back(-length);
  for (double b : kernel.breakpoints()) {
    cuts.push_back(x - b);
    cuts.push_back(b - x);
  }
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [&](double y) {
    const double value = y > -length ? u(y) : far_field;
    return (kernel.density(x - y) - kernel.density(x + y)) * value;
  };
  return quad::adaptive(integrand, lower, 0.0, cuts, 1e-12, 1e-11, 24);
}

double brute_force_convolve(const Kernel& kernel, const HalfLineField& field, double x) {
  const std::vector<double> nodes = field.grid.nodes();
  return brute_force_convolve(
      kernel, [&](double y) { return field(y); }, field.far_field, field.grid.length(), x, nodes);
}

}  // namespace nlb
