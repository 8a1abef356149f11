#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nlb/convolve.hpp"
#include "nlb/error.hpp"
#include "nlb/kernel.hpp"

using namespace nlb;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Positive nonincreasing field below far on the grid, vanishing at 0 half the time.
std::vector<double> random_admissible(std::mt19937_64& rng, std::size_t size, double far) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> steps(size);
  for (double& s : steps) s = std::pow(unit(rng), 3.0);
  std::vector<double> u(size);
  double total = 0.0;
  for (double s : steps) total += s;
  const double drop = far * (0.5 + 0.5 * unit(rng));
  double level = far;
  for (std::size_t i = 0; i < size; ++i) {
    level -= drop * steps[i] / total;
    u[i] = std::max(level, 0.0);
  }
  if (unit(rng) < 0.5) u.back() = 0.0;
  return u;
}

}  // namespace

TEST_CASE("half-line grid") {
  const HalfLineGrid grid(25.0, 100);
  CHECK(grid.size() == 101);
  CHECK(grid.spacing() == doctest::Approx(0.25));
  CHECK(grid.node(0) == -25.0);
  CHECK(grid.node(100) == 0.0);
  const auto x = grid.nodes();
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  CHECK_THROWS_AS(HalfLineGrid(-1.0, 10), Error);
  CHECK_THROWS_AS(HalfLineGrid(10.0, 63), Error);
}

TEST_CASE("constant half-line field gives the odd step response") {
  const Kernel k = Kernel::exponential(1.0);
  const double uc = 1.0;
  const HalfLineGrid grid(30.0, 600);
  const OddConvolver conv(k, grid);
  const std::vector<double> u(grid.size(), uc);
  const auto g = conv.apply(u, uc);
  double worst = 0.0;
  for (int i = 0; i < grid.cells(); ++i) {
    worst = std::max(worst, std::abs(g[i] - uc * (1.0 - std::exp(grid.node(i)))));
  }
  CHECK(worst <= 5e-4);
  CHECK(worst <= 1e-12);
  CHECK(g.back() == 0.0);
  CHECK(std::abs(g.front() - uc) <= 1e-10);
}

TEST_CASE("agreement with adaptive quadrature on random admissible fields") {
  std::mt19937_64 rng(20261016);
  const std::vector<Kernel> kernels = {Kernel::exponential(1.0), Kernel::gaussian(1.0),
                                       Kernel::uniform(1.0), Kernel::triangular(1.5)};
  for (int trial = 0; trial < 50; ++trial) {
    const Kernel& k = kernels[static_cast<std::size_t>(trial) % kernels.size()];
    const HalfLineGrid grid(25.0, 100);
    const HalfLineField field(grid, random_admissible(rng, grid.size(), 1.5), 1.5);
    REQUIRE(field.admissible());
    const auto g = odd_convolve(k, field);
    double worst = 0.0;
    for (int i = 0; i <= grid.cells(); i += 7) {
      worst = std::max(worst, std::abs(g[i] - brute_force_convolve(k, field, grid.node(i))));
    }
    CAPTURE(trial);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("weights are nonnegative for decreasing kernels") {
  for (const Kernel& k : {Kernel::exponential(2.0), Kernel::uniform(0.7), Kernel::gaussian(1.0)}) {
    const OddConvolver conv(k, HalfLineGrid(25.0, 80));
    for (int i = 0; i <= 80; ++i) {
      for (int j = 0; j <= 80; ++j) CHECK(conv.weight(i, j) >= -1e-15);
    }
  }
}

TEST_CASE("convolution preserves ordering") {
  std::mt19937_64 rng(7);
  const Kernel k = Kernel::exponential(1.0);
  const HalfLineGrid grid(25.0, 200);
  const OddConvolver conv(k, grid);
  std::uniform_real_distribution<double> unit(0.0, 0.2);
  for (int trial = 0; trial < 10; ++trial) {
    auto low = random_admissible(rng, grid.size(), 1.0);
    auto high = low;
    for (double& v : high) v = std::min(1.0, v + unit(rng));
    const auto gl = conv.apply(low, 1.0);
    const auto gh = conv.apply(high, 1.0);
    for (std::size_t i = 0; i < gl.size(); ++i) CHECK(gl[i] <= gh[i] + 1e-14);
  }
}

TEST_CASE("second-order accuracy on a smooth field") {
  const Kernel k = Kernel::exponential(1.0);
  const double length = 30.0;
  const auto u = [](double y) { return 1.0 - 0.5 * std::exp(y); };
  std::vector<double> probes = {-8.0, -4.0, -2.0, -1.0, -0.5, -0.25};
  std::vector<double> exact;
  for (double x : probes) exact.push_back(brute_force_convolve(k, u, 1.0, length, x));
  std::vector<double> errors;
  for (int cells : {240, 480, 960}) {
    const HalfLineGrid grid(length, cells);
    std::vector<double> values;
    for (double x : grid.nodes()) values.push_back(u(x));
    const auto g = OddConvolver(k, grid).apply(values, 1.0);
    double worst = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const int i = static_cast<int>(std::lround((probes[p] + length) / grid.spacing()));
      REQUIRE(std::abs(grid.node(i) - probes[p]) <= 1e-12);
      worst = std::max(worst, std::abs(g[i] - exact[p]));
    }
    errors.push_back(worst);
  }
  for (std::size_t e = 1; e < errors.size(); ++e) {
    CAPTURE(errors[e - 1]);
    CAPTURE(errors[e]);
    CHECK(std::log2(errors[e - 1] / errors[e]) >= 1.8);
  }
}

TEST_CASE("fft and direct paths agree") {
  std::mt19937_64 rng(99);
  for (const Kernel& k : {Kernel::exponential(0.5), Kernel::gaussian(2.0), Kernel::triangular(1.0)}) {
    const HalfLineGrid grid(60.0, 1500);
    const OddConvolver conv(k, grid);
    const auto u = random_admissible(rng, grid.size(), 2.0);
    CHECK(max_abs_diff(conv.apply_fft(u, 2.0), conv.apply_direct(u, 2.0)) <= 1e-10);
  }
}

TEST_CASE("full-line convolution reproduces constants") {
  const Kernel k = Kernel::gaussian(1.0);
  const FullLineConvolver conv(k, -20.0, 20.0, 800);
  for (double c : {1.0, -0.3, 7.5}) {
    const std::vector<double> u(801, c);
    for (double v : conv.apply(u, c, c)) CHECK(std::abs(v - c) <= 1e-12);
  }
}

TEST_CASE("full-line convolution of a step at the left edge") {
  const Kernel k = Kernel::exponential(1.0);
  const double a = -1.0;
  const double b = 49.0;
  const int cells = 500;
  const FullLineConvolver conv(k, a, b, cells);
  const std::vector<double> u(cells + 1, 0.0);
  const auto g = conv.apply(u, 1.0, 0.0);
  const double h = (b - a) / cells;
  double worst = 0.0;
  for (int j = 0; j <= cells; ++j) {
    worst = std::max(worst, std::abs(g[j] - k.cdf(a - (a + j * h))));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("full-line convolution of an odd field vanishes at the center") {
  const Kernel k = Kernel::gaussian(1.0);
  const int cells = 600;
  const double length = 15.0;
  std::vector<double> u(cells + 1);
  for (int j = 0; j <= cells; ++j) u[j] = -std::tanh(-length + 2.0 * length * j / cells);
  const auto g = full_line_convolve(k, -length, length, u, 1.0, -1.0);
  CHECK(std::abs(g[cells / 2]) <= 1e-12);
  for (int j = 0; j <= cells; ++j) CHECK(std::abs(g[j] + g[cells - j]) <= 1e-12);
}

TEST_CASE("preconditions") {
  const Kernel k = Kernel::exponential(1.0);
  try {
    OddConvolver(k, HalfLineGrid(10.0, 100));
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
  CHECK_NOTHROW(OddConvolver(k, HalfLineGrid(24.0, 100)));
  try {
    FullLineConvolver(k, -5.0, 5.0, 100);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
  CHECK_THROWS_AS(FullLineConvolver(k, 5.0, -5.0, 100), Error);
  const OddConvolver conv(k, HalfLineGrid(25.0, 64));
  CHECK_THROWS_AS(conv.apply(std::vector<double>(10, 1.0), 1.0), Error);
}
