// Finite-volume integrator for u_t + (u^2/2)_x = K*u - u on a bounded
// interval with constant far-field states, used to validate computed waves.
//
// First-order Rusanov flux, forward Euler in time, source term in the same
// stage. K*u is taken over the cell centers with the far-field constants
// outside, using row-normalized weights so constants are exact steady states.

#ifndef NLB_CAUCHY_HPP_
#define NLB_CAUCHY_HPP_

#include <functional>
#include <span>
#include <vector>

#include "nlb/convolve.hpp"
#include "nlb/kernel.hpp"
#include "nlb/waves.hpp"

namespace nlb {

struct SimConfig {
  double a = -40.0;
  double b = 40.0;
  int cells = 2000;  // M
  double cfl = 0.4;
  double t_end = 5.0;  // T
  double u_left = 0.0;
  double u_right = 0.0;
  double snapshot_interval = 0.5;
  ConvolutionPath path = ConvolutionPath::fft;

  // Throws Error(invalid_argument) unless a < b, M >= 128, 0 < CFL <= 0.9,
  // T > 0 and the snapshot interval is positive.
  void validate() const;
  double dx() const { return (b - a) / cells; }
  double center(int j) const { return a + (j + 0.5) * dx(); }
  std::vector<double> centers() const;
};

struct SimState {
  std::vector<double> u;  // cell averages
  double t = 0.0;
};

SimState sample_state(const SimConfig& cfg, const std::function<double(double)>& u0);
SimState constant_state(const SimConfig& cfg, double value);
// U(x) of a wave profile at the cell centers, at t = 0.
SimState state_from_profile(const SimConfig& cfg, const WaveProfile& profile);

// Rusanov flux for f(u) = u^2 / 2.
double rusanov_flux(double left, double right);

// CFL dx / max(|u|, 1e-9), capped at 0.5.
double stable_dt(const SimState& state, const SimConfig& cfg);

// Holds the convolution weights for a fixed configuration.
class Stepper {
 public:
  Stepper(const Kernel& kernel, const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }

  // One forward Euler step of size dt. Throws Error(non_finite) on blow-up.
  SimState step(const SimState& state, double dt) const;
  SimState step(const SimState& state) const { return step(state, stable_dt(state, cfg_)); }

  // (K*u) at the cell centers.
  std::vector<double> source_convolution(std::span<const double> u) const;

 private:
  SimConfig cfg_;
  FullLineConvolver conv_;
};

SimState step(const SimState& state, const Kernel& kernel, const SimConfig& cfg);

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  double max_slope = 0.0;        // max_j |u_{j+1} - u_j| / dx
  double total_variation = 0.0;  // sum_j |u_{j+1} - u_j|
};

double max_slope(std::span<const double> u, double dx);
double total_variation(std::span<const double> u);

struct Trajectory {
  SimConfig config;
  std::vector<double> x;  // cell centers
  std::vector<Snapshot> snapshots;
  int steps = 0;
};

// Steps to T, landing exactly on every snapshot time; snapshot 0 is the
// initial state. Throws Error(precondition) when the state near the
// boundaries differs from the far fields by more than 1e-6, and
// Error(invariant_violation) when a value leaves the band
// [min(u_left, u_right, init) - 0.1, max(...) + 0.1].
Trajectory simulate(const SimState& init, const Kernel& kernel, const SimConfig& cfg);

struct SpeedEstimate {
  double speed = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double max_residual = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
};

// Position where u first crosses level, by linear interpolation between
// the bracketing samples. Throws Error(precondition) if it never does.
double level_crossing(std::span<const double> x, std::span<const double> u, double level);

// Least-squares slope of the level crossing against time. Needs at least 5
// snapshots and level strictly between the far fields.
SpeedEstimate measure_speed(const Trajectory& trajectory, double level);

// dx sum_j |u_j - U(x_j - s t)| for a snapshot at time t.
double l1_translate_error(const Trajectory& trajectory, const Snapshot& snapshot,
                          const WaveProfile& profile);
double l1_translate_error(const Trajectory& trajectory, const Snapshot& snapshot,
                          const std::function<double(double)>& profile, double speed);

}  // namespace nlb

#endif  // NLB_CAUCHY_HPP_
