// Convolution kernels for the nonlocal Burgers equation.
//
// A kernel K is even, nonnegative and of unit mass. Every family exposes its
// density, cumulative mass Phi(x) = int_{-inf}^x K, and the moments
// M1 = int |y| K(y) dy and M2 = int y^2 K(y) dy in closed form (tabulated
// kernels use exact integrals of their piecewise-linear interpolant).

#ifndef NLB_KERNEL_HPP_
#define NLB_KERNEL_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlb {

enum class KernelFamily { exponential, gaussian, uniform, triangular, tabulated };

std::string_view family_name(KernelFamily family);

struct TableOptions {
  bool renormalize = false;  // rescale to unit mass instead of rejecting
  bool strict = true;        // reject non-even / negative / non-unit tables
};

class Kernel;

// Reads a two-column CSV (header row, then y,K(y)).
Kernel read_kernel_table(const std::string& path, TableOptions options = {});

struct KernelMoments {
  double m1 = 0.0;  // int |y| K(y) dy
  double m2 = 0.0;  // int y^2 K(y) dy
};

class Kernel {
 public:
  static Kernel exponential(double rate);
  static Kernel gaussian(double sigma);
  static Kernel uniform(double half_width);
  static Kernel triangular(double half_width);
  // Samples K(y_j) on a uniform, strictly increasing, symmetric abscissa.
  // The density is the piecewise-linear interpolant, zero outside the table.
  static Kernel tabulated(std::vector<double> y, std::vector<double> values,
                          TableOptions options = {});

  KernelFamily family() const { return family_; }
  // k, sigma or a; zero for tabulated kernels.
  double parameter() const { return param_; }

  double density(double y) const;
  double cdf(double x) const;
  KernelMoments moments() const { return moments_; }

  // Smallest R >= 0 with Phi(-R) <= mass.
  double tail_radius(double mass) const;
  // Finite support half-width, if any.
  std::optional<double> support_radius() const;
  // Abscissae where the density is not smooth (kinks or jumps), ascending.
  const std::vector<double>& breakpoints() const { return breaks_; }

  // Canonical spec string ("exp:k=1", "table:<n> samples", ...).
  std::string spec() const;

  // Raw table (empty for analytic families).
  const std::vector<double>& table_abscissae() const;
  const std::vector<double>& table_values() const;

 private:
  friend Kernel read_kernel_table(const std::string& path, TableOptions options);

  struct Table;

  Kernel(KernelFamily family, double param);
  void finish();

  KernelFamily family_;
  double param_;
  std::shared_ptr<const Table> table_;
  std::vector<double> breaks_;
  KernelMoments moments_{};
};

// Parses "exp:k=1", "gauss:sigma=1", "uniform:a=1", "tri:a=1" or
// "table:path.csv[:renorm]".
Kernel build_kernel(std::string_view spec);

double kernel_cdf(const Kernel& kernel, double x);
KernelMoments kernel_moments(const Kernel& kernel);

struct KernelCheck {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  // Advisory checks are reported but do not fail the kernel.
  bool advisory = false;
  std::string note;
};

struct KernelReport {
  std::string kernel;
  std::vector<KernelCheck> checks;

  bool all_passed() const;
  const KernelCheck* find(std::string_view name) const;
};

// Probes the hypotheses of the existence theory: evenness, nonnegativity,
// unit mass, monotone decay on (0, inf), finite second moment, bounded
// variation. Failures are reported, never thrown.
KernelReport validate_kernel(const Kernel& kernel, int probe_count);

}  // namespace nlb

#endif  // NLB_KERNEL_HPP_
