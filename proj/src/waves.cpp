#include "nlb/waves.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlb/error.hpp"
#include "nlb/format.hpp"
#include "nlb/quadrature.hpp"

namespace nlb {

WaveParams::WaveParams(double u_minus, double u_plus) : u_minus_(u_minus), u_plus_(u_plus) {
  if (!std::isfinite(u_minus) || !std::isfinite(u_plus)) {
    throw Error(ErrorKind::invalid_argument, "u_minus and u_plus must be finite");
  }
  if (!(u_minus > u_plus)) {
    throw Error(ErrorKind::invalid_argument, "u_minus must exceed u_plus");
  }
  speed_ = 0.5 * (u_minus + u_plus);
  u_c_ = 0.5 * (u_minus - u_plus);
}

std::string_view shock_class_name(ShockClass c) {
  switch (c) {
    case ShockClass::continuous: return "continuous";
    case ShockClass::discontinuous: return "discontinuous";
    case ShockClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

double default_length(const Kernel& kernel, const WaveParams& params) {
  const double m2 = kernel.moments().m2;
  const double uc = params.half_amplitude();
  return std::max(25.0 * std::max({1.0, std::sqrt(m2), uc}), 10.0 * m2 / uc);
}

// --- profile views ----------------------------------------------------------

std::vector<double> WaveProfile::full_line_x() const {
  const int n = grid.cells();
  std::vector<double> x(static_cast<std::size_t>(2 * n + 1));
  for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = grid.node(i);
  for (int i = n + 1; i <= 2 * n; ++i) x[static_cast<std::size_t>(i)] = -grid.node(2 * n - i);
  return x;
}

std::vector<double> WaveProfile::full_line_u() const {
  const int n = grid.cells();
  const double s = params.speed();
  std::vector<double> U(static_cast<std::size_t>(2 * n + 1));
  for (int i = 0; i < n; ++i) U[static_cast<std::size_t>(i)] = s + u[static_cast<std::size_t>(i)];
  U[static_cast<std::size_t>(n)] = s;
  for (int i = n + 1; i <= 2 * n; ++i) {
    U[static_cast<std::size_t>(i)] = s - u[static_cast<std::size_t>(2 * n - i)];
  }
  return U;
}

double WaveProfile::evaluate(double x) const {
  const HalfLineField f = field();
  const double s = params.speed();
  if (x < 0.0) return s + f(x);
  if (x > 0.0) return s - f(-x);
  return s;
}

double IterationTrace::worst_sup_diff_increase() const {
  double worst = 0.0;
  for (std::size_t k = 2; k < records.size(); ++k) {
    worst = std::max(worst, records[k].sup_diff - records[k - 1].sup_diff);
  }
  return worst;
}

// --- super- and subsolution -------------------------------------------------

HalfLineField supersolution(const WaveParams& params, const HalfLineGrid& grid) {
  return {grid, std::vector<double>(grid.size(), params.half_amplitude()),
          params.half_amplitude()};
}

double SubsolutionSpec::value(double x) const {
  return -(2.0 * half_amplitude / std::numbers::pi) * std::atan(epsilon * x);
}

double subsolution_g(const Kernel& kernel, double half_amplitude, double epsilon, double x) {
  // -int K(x-y)(atan(eps y) - atan(eps x)) dy, folded onto z = |x - y| >= 0.
  // Each atan difference is evaluated through atan2 to avoid cancellation.
  const double reach = kernel.support_radius().value_or(kernel.tail_radius(1e-17));
  std::vector<double> cuts;
  for (double b : kernel.breakpoints())
    if (b > 0.0) cuts.push_back(b);
  const double e2x = epsilon * epsilon * x;
  const double denominator = (2.0 * half_amplitude / std::numbers::pi) *
                             std::atan(epsilon * x) * epsilon / (1.0 + e2x * x);
  const double numerator = quad::adaptive(
      [&](double z) {
        const double left = std::atan2(epsilon * z, 1.0 + e2x * (x - z));
        const double right = std::atan2(epsilon * z, 1.0 + e2x * (x + z));
        return kernel.density(z) * (left - right);
      },
      0.0, reach, cuts, 1e-10, 1e-13 * std::abs(denominator), 20);
  return numerator / denominator;
}

double subsolution_g_origin(const Kernel& kernel, double half_amplitude, double epsilon) {
  const double reach = kernel.support_radius().value_or(kernel.tail_radius(1e-17));
  std::vector<double> cuts;
  for (double b : kernel.breakpoints())
    if (b > 0.0) cuts.push_back(b);
  const double integral = 2.0 * quad::adaptive(
                                    [&](double y) {
                                      return y * y * kernel.density(y) /
                                             (1.0 + epsilon * epsilon * y * y);
                                    },
                                    0.0, reach, cuts, 1e-12, 1e-15, 20);
  return std::numbers::pi * epsilon / (2.0 * half_amplitude) * integral;
}

SubsolutionSpec subsolution(const WaveParams& params, const Kernel& kernel,
                            const HalfLineGrid& grid) {
  const double uc = params.half_amplitude();
  const double m2 = kernel.moments().m2;
  if (!std::isfinite(m2) || !(m2 > 0.0)) {
    throw Error(ErrorKind::precondition, "subsolution needs a finite positive second moment");
  }
  constexpr int kProbes = 512;
  constexpr int kMaxHalvings = 40;
  const double length = grid.length();

  SubsolutionSpec spec;
  spec.half_amplitude = uc;
  double eps = uc / (std::numbers::pi * m2);
  for (int halving = 0; halving <= kMaxHalvings; ++halving, eps *= 0.5) {
    double g_max = subsolution_g_origin(kernel, uc, eps);
    const double g_origin = g_max;
    for (int p = 0; p < kProbes && g_max <= 1.0; ++p) {
      const double x = -length + length * p / kProbes;
      g_max = std::max(g_max, subsolution_g(kernel, uc, eps, x));
    }
    if (g_max <= 1.0) {
      spec.epsilon = eps;
      spec.g_max = g_max;
      spec.g_origin = g_origin;
      spec.halvings = halving;
      spec.samples.resize(grid.size());
      for (int i = 0; i <= grid.cells(); ++i) {
        spec.samples[static_cast<std::size_t>(i)] = spec.value(grid.node(i));
      }
      return spec;
    }
  }
  throw Error(ErrorKind::no_convergence,
              "subsolution: g(x, eps) <= 1 not reached after 40 halvings of eps "
              "(kernel " + kernel.spec() + ")");
}

// --- the iteration ----------------------------------------------------------

namespace {

// int of 1/u across a cell where u is linear from left to right:
// (h / m) atanh(d) / d with m the mean and d the relative half-difference.
double cell_rate(double left, double right, double h) {
  if (!(right > 0.0)) return std::numeric_limits<double>::infinity();
  const double mean = 0.5 * (left + right);
  const double d = (left - right) / (left + right);
  const double ratio = std::abs(d) < 1e-4 ? 1.0 + d * d / 3.0 : std::atanh(d) / d;
  return h / mean * ratio;
}

// (1 - e^{-z}(1 + z)) / z, the weight of the left endpoint in
// int_0^z G(tau) e^{-tau} dtau with G linear in tau.
double left_weight(double z) {
  if (z < 0.05) {
    // sum_{k>=2} (-1)^k (k-1) z^{k-1} / k!
    double term_sum = 0.0;
    double power = 1.0;  // z^{k-1}
    double factorial = 1.0;
    for (int k = 2; k <= 9; ++k) {
      power *= z;
      factorial *= k;
      const double term = (k - 1) * power / factorial;
      term_sum += (k % 2 == 0) ? term : -term;
    }
    return term_sum;
  }
  return (1.0 - std::exp(-z) * (1.0 + z)) / z;
}

void require_finite(double value, const char* what, int node) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at node " << node;
    throw Error(ErrorKind::non_finite, msg.str());
  }
}

}  // namespace

HalfLineField iterate_once(const OddConvolver& conv, const HalfLineField& u_n,
                           const WaveParams& params) {
  const HalfLineGrid& grid = conv.grid();
  const int n = grid.cells();
  if (u_n.values.size() != grid.size()) {
    throw Error(ErrorKind::invalid_argument, "iterate_once: field does not match the grid");
  }
  const auto& un = u_n.values;
  for (int i = 0; i <= n; ++i) {
    const double v = un[static_cast<std::size_t>(i)];
    require_finite(v, "iterate", i);
    if (i < n && v < kPositivityFloor) {
      std::ostringstream msg;
      msg << "iterate collapsed below the positivity floor: u(" << grid.node(i) << ") = " << v
          << " on grid L=" << grid.length() << " N=" << n << " (u_minus=" << params.u_minus()
          << ", u_plus=" << params.u_plus() << ")";
      throw Error(ErrorKind::floor_breach, msg.str());
    }
    if (i == n && v < 0.0) {
      throw Error(ErrorKind::floor_breach, "iterate is negative at the origin");
    }
  }

  const double uc = params.half_amplitude();
  const std::vector<double> g = conv.apply(un, uc);
  const double h = grid.spacing();

  std::vector<double> next(grid.size());
  next[0] = uc;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double z = cell_rate(un[k], un[k + 1], h);
    double decay = 0.0;
    double w_left = 0.0;
    double w_right = 1.0;
    if (std::isfinite(z)) {
      decay = std::exp(-z);
      w_left = left_weight(z);
      w_right = -std::expm1(-z) - w_left;
    }
    const double value = decay * next[k] + w_right * g[k + 1] + w_left * g[k];
    require_finite(value, "update", i + 1);
    next[k + 1] = value;
  }
  return {grid, std::move(next), uc};
}

HalfLineField iterate_once(const Kernel& kernel, const HalfLineField& u_n,
                           const WaveParams& params) {
  const OddConvolver conv(kernel, u_n.grid);
  return iterate_once(conv, u_n, params);
}

WaveSolution solve_wave(const Kernel& kernel, const WaveParams& params,
                        const SolverOptions& opts) {
  if (opts.max_iter < 1 || !(opts.tol > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "solver needs max_iter >= 1 and tol > 0");
  }
  const double length = opts.length.value_or(default_length(kernel, params));
  const HalfLineGrid grid(length, opts.cells);
  const OddConvolver conv(kernel, grid, opts.path);
  const double uc = params.half_amplitude();

  WaveSolution out{WaveProfile{params, grid, {}}, {}, subsolution(params, kernel, grid)};
  const auto& sub = out.subsolution.samples;

  HalfLineField current = supersolution(params, grid);
  const int n = grid.cells();
  bool converged = false;
  double sup_diff = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    HalfLineField next = iterate_once(conv, current, params);
    const auto& a = current.values;
    const auto& b = next.values;

    IterationRecord rec;
    rec.n = it;
    rec.u_origin = b.back();
    sup_diff = 0.0;
    for (int i = 0; i <= n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      sup_diff = std::max(sup_diff, std::abs(b[k] - a[k]));
      if (i < n && b[k + 1] > b[k] + kOrderingTol) ++rec.monotonicity_violations;
      if (b[k] > a[k] + kOrderingTol) ++rec.ordering_violations;
      if (b[k] > uc + kOrderingTol) ++rec.ordering_violations;
      if (b[k] < sub[k] - kOrderingTol) ++rec.ordering_violations;
      if (i < n && !(b[k] > 0.0)) ++rec.ordering_violations;
    }
    rec.sup_diff = sup_diff;
    out.trace.records.push_back(rec);
    if (rec.monotonicity_violations > 0 || rec.ordering_violations > 0) {
      std::ostringstream msg;
      msg << "monotone iteration broke its invariants at n=" << it << " ("
          << rec.monotonicity_violations << " monotonicity, " << rec.ordering_violations
          << " ordering violations) for kernel " << kernel.spec() << ", N=" << n;
      throw Error(ErrorKind::invariant_violation, msg.str());
    }
    current = std::move(next);
    iterations = it;
    if (sup_diff <= opts.tol) {
      converged = true;
      break;
    }
  }

  out.profile.u = std::move(current.values);
  out.profile.iterations = iterations;
  out.profile.final_sup_diff = sup_diff;
  out.profile.converged = converged;
  out.profile.classification = ShockClass::indeterminate;
  return out;
}

// --- classification ---------------------------------------------------------

ShockClass classify_jumps(const std::array<double, 3>& jumps, double finest_spacing,
                          std::array<double, 2>* ratios) {
  auto ratio = [](double coarse, double fine) {
    if (coarse > 0.0) return fine / coarse;
    return fine > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  const std::array<double, 2> r{ratio(jumps[0], jumps[1]), ratio(jumps[1], jumps[2])};
  if (ratios) *ratios = r;
  if (r[0] <= 0.6 && r[1] <= 0.6) return ShockClass::continuous;
  if (r[0] >= 0.9 && r[1] >= 0.9 && jumps[2] > kJumpSpacingFactor * finest_spacing) {
    return ShockClass::discontinuous;
  }
  return ShockClass::indeterminate;
}

ShockClassification classify_shock(const Kernel& kernel, const WaveParams& params,
                                   const SolverOptions& opts) {
  ShockClassification out;
  out.threshold = 4.0 * kernel.moments().m1;
  out.predicted_by_theorem = params.amplitude() > out.threshold;
  out.length = opts.length.value_or(default_length(kernel, params));

  std::array<std::future<WaveSolution>, 3> pending;
  for (int level = 0; level < 3; ++level) {
    SolverOptions o = opts;
    o.length = out.length;
    o.cells = opts.cells << level;
    out.cells[static_cast<std::size_t>(level)] = o.cells;
    pending[static_cast<std::size_t>(level)] =
        std::async(std::launch::async, [&kernel, &params, o] { return solve_wave(kernel, params, o); });
  }
  std::vector<WaveSolution> solutions;
  for (auto& f : pending) solutions.push_back(f.get());

  out.all_converged = true;
  for (std::size_t level = 0; level < 3; ++level) {
    out.jumps[level] = solutions[level].profile.jump();
    out.all_converged = out.all_converged && solutions[level].profile.converged;
  }
  out.finest_spacing = solutions[2].profile.grid.spacing();
  out.measured = classify_jumps(out.jumps, out.finest_spacing, &out.ratios);
  if (!out.all_converged) out.measured = ShockClass::indeterminate;
  out.consistent = !(out.predicted_by_theorem && out.measured == ShockClass::continuous);
  out.finest = std::move(solutions[2]);
  out.finest->profile.classification = out.measured;
  return out;
}

// --- residual checks --------------------------------------------------------

namespace {

constexpr int kCollar = 5;

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * h;
}

constexpr double kBumpCuts[] = {-0.5, 0.0, 0.5};

double bump_mass() {
  static const double mass = quad::adaptive(
      [](double t) { return std::exp(-1.0 / (1.0 - t * t)); }, -1.0, 1.0, kBumpCuts,
      1e-12, 1e-15);
  return mass;
}

}  // namespace

PointwiseResidual pointwise_residual(const HalfLineField& field, const Kernel& kernel) {
  const OddConvolver conv(kernel, field.grid);
  const std::vector<double> g = conv.apply(field.values, field.far_field);
  const auto& u = field.values;
  const int n = field.grid.cells();
  const double h = field.grid.spacing();

  // Where K jumps at +-b, K*u has a slope kink at x = -b once u jumps at 0;
  // nodes whose stencil straddles such a kink are skipped like the collar.
  std::vector<double> kinks;
  for (double b : kernel.breakpoints()) {
    if (b > 0.0 && std::abs(kernel.density(b * (1.0 - 1e-12)) - kernel.density(b * (1.0 + 1e-12))) > 0.0)
      kinks.push_back(-b);
  }
  auto near_kink = [&](double x) {
    return std::any_of(kinks.begin(), kinks.end(),
                       [&](double k) { return std::abs(x - k) < h; });
  };

  PointwiseResidual out;
  out.spacing = h;
  out.min_slope = std::numeric_limits<double>::infinity();
  out.max_slope = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n - kCollar; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (i > 0 && near_kink(field.grid.node(i))) continue;
    const double slope = i == 0 ? (u[1] - u[0]) / h : (u[k + 1] - u[k - 1]) / (2.0 * h);
    out.min_slope = std::min(out.min_slope, slope);
    out.max_slope = std::max(out.max_slope, slope);
    out.residual = std::max(out.residual, std::abs(u[k] * slope - (g[k] - u[k])));
  }
  return out;
}

PointwiseResidual pointwise_residual(const WaveProfile& profile, const Kernel& kernel) {
  return pointwise_residual(profile.field(), kernel);
}

double Bump::operator()(double x) const {
  const double t = (x - center) / width;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t)) / (width * bump_mass());
}

double Bump::derivative(double x) const {
  const double t = (x - center) / width;
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return (*this)(x) * (-2.0 * t / (q * q)) / width;
}

std::vector<Bump> default_bumps() { return {{-5.0, 3.0}, {0.0, 2.0}, {4.0, 3.0}}; }

namespace {

// Trapezoid evaluation of the weak form; flux_state feeds U^2/2 - sU and U
// feeds the source term.
double weak_functional(std::span<const double> x, std::span<const double> flux_state,
                       std::span<const double> U, std::span<const double> KU, double speed,
                       const std::vector<Bump>& bumps) {
  if (x.size() < 2 || U.size() != x.size() || KU.size() != x.size() ||
      flux_state.size() != x.size()) {
    throw Error(ErrorKind::invalid_argument, "weak_residual: sample arrays must match");
  }
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  double worst = 0.0;
  std::vector<double> integrand(x.size());
  for (const Bump& bump : bumps) {
    if (bump.center - bump.width <= x.front() || bump.center + bump.width >= x.back()) {
      throw Error(ErrorKind::invalid_argument, "weak_residual: bump support exceeds the grid");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double flux = 0.5 * flux_state[i] * flux_state[i] - speed * flux_state[i];
      integrand[i] = flux * bump.derivative(x[i]) + (KU[i] - U[i]) * bump(x[i]);
    }
    worst = std::max(worst, std::abs(trapezoid(integrand, h)));
  }
  return worst;
}

}  // namespace

double weak_residual(std::span<const double> x, std::span<const double> U,
                     std::span<const double> KU, double speed, const std::vector<Bump>& bumps) {
  return weak_functional(x, U, U, KU, speed, bumps);
}

double weak_residual(const WaveProfile& profile, const Kernel& kernel,
                     const std::vector<Bump>& bumps) {
  const OddConvolver conv(kernel, profile.grid);
  const std::vector<double> g = conv.apply(profile.u, profile.params.half_amplitude());
  const int n = profile.grid.cells();
  const double s = profile.params.speed();
  const std::vector<double> x = profile.full_line_x();
  const std::vector<double> U = profile.full_line_u();
  std::vector<double> KU(U.size());
  for (int i = 0; i <= n; ++i) KU[static_cast<std::size_t>(i)] = s + g[static_cast<std::size_t>(i)];
  for (int i = n + 1; i <= 2 * n; ++i) {
    KU[static_cast<std::size_t>(i)] = s - g[static_cast<std::size_t>(2 * n - i)];
  }
  // U^2/2 - sU is single-valued across the jump (Rankine-Hugoniot), so the
  // origin uses a one-sided state there; the source term keeps U(0) = s.
  std::vector<double> flux_state(U);
  flux_state[static_cast<std::size_t>(n)] = s + profile.u.back();
  return weak_functional(x, flux_state, U, KU, s, bumps);
}

double flux_balance(const HalfLineField& field, const Kernel& kernel) {
  const OddConvolver conv(kernel, field.grid);
  const std::vector<double> g = conv.apply(field.values, field.far_field);
  std::vector<double> source(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) source[i] = g[i] - field.values[i];
  const double integral = trapezoid(source, field.grid.spacing());
  const double origin = field.values.back();
  const double uc = field.far_field;
  return std::abs(integral - 0.5 * (origin * origin - uc * uc));
}

double flux_balance(const WaveProfile& profile, const Kernel& kernel) {
  return flux_balance(profile.field(), kernel);
}

JumpIdentity jump_identity(const WaveProfile& profile, const Kernel& kernel) {
  if (profile.classification == ShockClass::discontinuous) {
    throw Error(ErrorKind::precondition,
                "jump_identity holds for continuous waves only; profile is discontinuous");
  }
  // int y K(y) int_0^1 u_odd(y t) dt dy = -2 int_{-inf}^0 K(y) C(y) dy with
  // C(y) = int_y^0 u(z) dz.
  const HalfLineGrid& grid = profile.grid;
  const int n = grid.cells();
  const double h = grid.spacing();
  const auto& u = profile.u;
  const double uc = profile.params.half_amplitude();

  std::vector<double> cum(grid.size(), 0.0);  // C at the nodes
  for (int i = n - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    cum[k] = cum[k + 1] + 0.5 * h * (u[k] + u[k + 1]);
  }
  auto antiderivative = [&](double y) {
    if (y <= -grid.length()) return cum[0] + uc * (-grid.length() - y);
    int j = static_cast<int>(std::floor((y + grid.length()) / h));
    j = std::clamp(j, 0, n - 1);
    const auto k = static_cast<std::size_t>(j);
    const double x1 = grid.node(j + 1);
    const double t = (y - grid.node(j)) / (x1 - grid.node(j));
    const double uy = u[k] + t * (u[k + 1] - u[k]);
    return cum[k + 1] + 0.5 * (x1 - y) * (uy + u[k + 1]);
  };

  const auto& breaks = kernel.breakpoints();
  double inner = 0.0;
  for (int j = 0; j < n; ++j) {
    inner += quad::gauss8([&](double y) { return kernel.density(y) * antiderivative(y); },
                          grid.node(j), grid.node(j + 1), breaks);
  }
  const double reach = kernel.support_radius().value_or(kernel.tail_radius(1e-17));
  if (reach > grid.length()) {
    inner += quad::adaptive([&](double y) { return kernel.density(y) * antiderivative(y); },
                            -reach, -grid.length(), breaks, 1e-12, 1e-300);
  }
  JumpIdentity out;
  out.lhs = -2.0 * inner;
  out.defect = std::abs(out.lhs + 0.5 * uc * uc);
  return out;
}

}  // namespace nlb
