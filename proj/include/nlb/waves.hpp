// Traveling waves U(x - s t) of u_t + u u_x + u - K*u = 0.
//
// With s = (u_- + u_+)/2 and u_c = (u_- - u_+)/2, U = s + u where u is odd,
// decreasing, u(-inf) = u_c, and solves u u' = K*u - u. The profile is built
// on the half line by the descending monotone iteration
//
//   u_{n+1} + u_n u_{n+1}' = K*u_n,   u_{n+1}(-inf) = u_c,
//
// started from the step supersolution u_0 = u_c. Each iterate is bracketed
// by the arctan subsolution and the previous iterate; these orderings are
// checked at every node of every iteration.

#ifndef NLB_WAVES_HPP_
#define NLB_WAVES_HPP_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "nlb/convolve.hpp"
#include "nlb/kernel.hpp"

namespace nlb {

class WaveParams {
 public:
  // Throws Error(invalid_argument) unless u_minus > u_plus (both finite).
  WaveParams(double u_minus, double u_plus);

  double u_minus() const { return u_minus_; }
  double u_plus() const { return u_plus_; }
  double speed() const { return speed_; }            // s
  double half_amplitude() const { return u_c_; }     // u_c
  double amplitude() const { return u_minus_ - u_plus_; }

 private:
  double u_minus_, u_plus_, speed_, u_c_;
};

enum class ShockClass { continuous, discontinuous, indeterminate };
std::string_view shock_class_name(ShockClass c);

struct SolverOptions {
  std::optional<double> length;  // L; default_length() when empty
  int cells = 4096;              // N
  double tol = 1e-8;             // on sup |u_{n+1} - u_n|
  int max_iter = 5000;
  ConvolutionPath path = ConvolutionPath::fft;
};

// max(25 max(1, sqrt(M2), u_c), 10 M2 / u_c); the second term covers the
// slow 2 u_c / M2 decay of small-amplitude waves.
double default_length(const Kernel& kernel, const WaveParams& params);

// Iterates must stay above this floor at every node left of the origin.
inline constexpr double kPositivityFloor = 1e-12;
// Slack used by every ordering/monotonicity check on iterates.
inline constexpr double kOrderingTol = 1e-10;

struct WaveProfile {
  WaveParams params;
  HalfLineGrid grid;
  std::vector<double> u;  // half-line component on (-L, 0]; u.back() = u(0-)
  int iterations = 0;
  double final_sup_diff = 0.0;
  bool converged = false;
  ShockClass classification = ShockClass::indeterminate;

  // J = 2 u(0-), the size of the jump of U at the origin.
  double jump() const { return 2.0 * u.back(); }
  HalfLineField field() const { return {grid, u, params.half_amplitude()}; }

  // Full-line view on 2N+1 nodes; U(x) = s + u(x), U(0) = s, U(-x) = 2s - U(x).
  std::vector<double> full_line_x() const;
  std::vector<double> full_line_u() const;
  // Interpolated U(x) for any x (far-field states outside [-L, L]).
  double evaluate(double x) const;
};

struct IterationRecord {
  int n = 0;
  double sup_diff = 0.0;
  double u_origin = 0.0;
  int monotonicity_violations = 0;
  int ordering_violations = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  // Largest increase of sup_diff between consecutive iterations n >= 1.
  double worst_sup_diff_increase() const;
};

struct SubsolutionSpec {
  double epsilon = 0.0;
  double half_amplitude = 0.0;
  double g_max = 0.0;       // max of g(x, eps) over the probes and x -> 0-
  double g_origin = 0.0;    // closed-form limit of g as x -> 0-
  int halvings = 0;
  std::vector<double> samples;  // on the solver grid

  // -(2 u_c / pi) atan(eps x)
  double value(double x) const;
};

HalfLineField supersolution(const WaveParams& params, const HalfLineGrid& grid);

// g(x, eps) evaluated from its definition (x < 0).
double subsolution_g(const Kernel& kernel, double half_amplitude, double epsilon, double x);
// lim_{x -> 0} g(x, eps) = (pi eps / 2u_c) int y^2 K(y) / (1 + eps^2 y^2) dy.
double subsolution_g_origin(const Kernel& kernel, double half_amplitude, double epsilon);
// Starts at eps = u_c / (pi M2) and halves until g <= 1 on 512 probes of
// [-L, 0) and at the origin. Throws Error(no_convergence) after 40 halvings.
SubsolutionSpec subsolution(const WaveParams& params, const Kernel& kernel,
                            const HalfLineGrid& grid);

// One step of the monotone iteration, marched from x = -L with u = u_c by an
// exponential integrator of u' = (K*u_n - u) / u_n that is exact when K*u_n
// is linear in the integrated rate.
HalfLineField iterate_once(const OddConvolver& conv, const HalfLineField& u_n,
                           const WaveParams& params);
HalfLineField iterate_once(const Kernel& kernel, const HalfLineField& u_n,
                           const WaveParams& params);

struct WaveSolution {
  WaveProfile profile;
  IterationTrace trace;
  SubsolutionSpec subsolution;
};

// Iterates from the supersolution until sup|u_{n+1} - u_n| <= tol. Hitting
// max_iter returns the last iterate with converged = false. Any ordering or
// monotonicity violation throws Error(invariant_violation).
WaveSolution solve_wave(const Kernel& kernel, const WaveParams& params,
                        const SolverOptions& opts = {});

struct ShockClassification {
  bool predicted_by_theorem = false;  // amplitude > 4 M1
  double threshold = 0.0;             // 4 M1
  ShockClass measured = ShockClass::indeterminate;
  std::array<int, 3> cells{};
  std::array<double, 3> jumps{};
  std::array<double, 2> ratios{};
  double finest_spacing = 0.0;
  double length = 0.0;
  bool all_converged = false;
  // predicted_by_theorem implies measured != continuous.
  bool consistent = true;
  std::optional<WaveSolution> finest;  // the 4N solve, tagged with measured
};

// A resolved jump must exceed this many finest-grid spacings. The numerical
// jump of a continuous wave stays below one spacing.
inline constexpr double kJumpSpacingFactor = 2.0;

// Jump-refinement test over N, 2N, 4N at fixed L: both ratios <= 0.6 means
// the jump vanishes (continuous); both >= 0.9 with J(4N) above
// kJumpSpacingFactor finest spacings means a grid-independent jump
// (discontinuous); anything else is indeterminate.
ShockClassification classify_shock(const Kernel& kernel, const WaveParams& params,
                                   const SolverOptions& opts = {});
ShockClass classify_jumps(const std::array<double, 3>& jumps, double finest_spacing,
                          std::array<double, 2>* ratios = nullptr);

// Residual of u u' = K*u - u at interior nodes (5-node collar at 0 removed).
struct PointwiseResidual {
  double residual = 0.0;
  double spacing = 0.0;
  double min_slope = 0.0;
  double max_slope = 0.0;
};
PointwiseResidual pointwise_residual(const HalfLineField& field, const Kernel& kernel);
PointwiseResidual pointwise_residual(const WaveProfile& profile, const Kernel& kernel);

// Normalized C-infinity bump exp(-1/(1-t^2)), t = (x - center)/width.
struct Bump {
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const;
  double derivative(double x) const;
};
std::vector<Bump> default_bumps();

// max over bumps of |int [(U^2/2 - s U) phi' + (K*U - U) phi] dx|.
double weak_residual(const WaveProfile& profile, const Kernel& kernel,
                     const std::vector<Bump>& bumps = default_bumps());
// Same functional for arbitrary full-line samples on uniform nodes x.
double weak_residual(std::span<const double> x, std::span<const double> U,
                     std::span<const double> KU, double speed, const std::vector<Bump>& bumps);

// |int_{-L}^0 (K*u - u) dx - (u(0-)^2 - u_c^2)/2|
double flux_balance(const HalfLineField& field, const Kernel& kernel);
double flux_balance(const WaveProfile& profile, const Kernel& kernel);

struct JumpIdentity {
  double lhs = 0.0;     // int y K(y) int_0^1 u(y t) dt dy
  double defect = 0.0;  // |lhs + u_c^2 / 2|
};
// Valid for continuous waves only; throws Error(precondition) when the
// profile is tagged discontinuous.
JumpIdentity jump_identity(const WaveProfile& profile, const Kernel& kernel);

}  // namespace nlb

#endif  // NLB_WAVES_HPP_
