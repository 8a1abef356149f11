#include "nlb/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlb/error.hpp"

namespace nlb {

namespace {

constexpr double kBandSlack = 0.1;
constexpr double kFarFieldTol = 1e-6;
constexpr double kMaxDt = 0.5;

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, what); };
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) fail("simulation domain needs a < b");
  if (cells < 128) fail("simulation needs at least 128 cells, got " + std::to_string(cells));
  if (!(cfl > 0.0) || cfl > 0.9) fail("CFL number must lie in (0, 0.9]");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("end time T must be positive");
  if (!(snapshot_interval > 0.0)) fail("snapshot interval must be positive");
  if (!std::isfinite(u_left) || !std::isfinite(u_right)) fail("far-field states must be finite");
}

std::vector<double> SimConfig::centers() const {
  std::vector<double> x(static_cast<std::size_t>(cells));
  for (int j = 0; j < cells; ++j) x[static_cast<std::size_t>(j)] = center(j);
  return x;
}

SimState sample_state(const SimConfig& cfg, const std::function<double(double)>& u0) {
  cfg.validate();
  SimState state;
  state.u.resize(static_cast<std::size_t>(cfg.cells));
  for (int j = 0; j < cfg.cells; ++j) state.u[static_cast<std::size_t>(j)] = u0(cfg.center(j));
  return state;
}

SimState constant_state(const SimConfig& cfg, double value) {
  return sample_state(cfg, [value](double) { return value; });
}

SimState state_from_profile(const SimConfig& cfg, const WaveProfile& profile) {
  return sample_state(cfg, [&](double x) { return profile.evaluate(x); });
}

double rusanov_flux(double left, double right) {
  const double speed = std::max(std::abs(left), std::abs(right));
  return 0.25 * (left * left + right * right) - 0.5 * speed * (right - left);
}

double stable_dt(const SimState& state, const SimConfig& cfg) {
  double peak = 0.0;
  for (double v : state.u) peak = std::max(peak, std::abs(v));
  return std::min(cfg.cfl * cfg.dx() / std::max(peak, 1e-9), kMaxDt);
}

Stepper::Stepper(const Kernel& kernel, const SimConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      conv_(kernel, cfg.center(0), cfg.center(cfg.cells - 1), cfg.cells - 1, cfg.path) {}

std::vector<double> Stepper::source_convolution(std::span<const double> u) const {
  return conv_.apply(u, cfg_.u_left, cfg_.u_right);
}

SimState Stepper::step(const SimState& state, double dt) const {
  const auto m = static_cast<std::size_t>(cfg_.cells);
  if (state.u.size() != m) {
    throw Error(ErrorKind::invalid_argument, "state size does not match the configuration");
  }
  const std::vector<double> ku = source_convolution(state.u);
  const double ratio = dt / cfg_.dx();
  const auto& u = state.u;

  SimState next;
  next.t = state.t + dt;
  next.u.resize(m);
  double flux_left = rusanov_flux(cfg_.u_left, u[0]);
  for (std::size_t j = 0; j < m; ++j) {
    const double right_state = j + 1 < m ? u[j + 1] : cfg_.u_right;
    const double flux_right = rusanov_flux(u[j], right_state);
    const double value = u[j] - ratio * (flux_right - flux_left) + dt * (ku[j] - u[j]);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "simulation produced a non-finite value at x=" << cfg_.center(static_cast<int>(j))
          << ", t=" << next.t;
      throw Error(ErrorKind::non_finite, msg.str());
    }
    next.u[j] = value;
    flux_left = flux_right;
  }
  return next;
}

SimState step(const SimState& state, const Kernel& kernel, const SimConfig& cfg) {
  return Stepper(kernel, cfg).step(state);
}

double max_slope(std::span<const double> u, double dx) {
  double peak = 0.0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) peak = std::max(peak, std::abs(u[j + 1] - u[j]));
  return peak / dx;
}

double total_variation(std::span<const double> u) {
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) sum += std::abs(u[j + 1] - u[j]);
  return sum;
}

Trajectory simulate(const SimState& init, const Kernel& kernel, const SimConfig& cfg) {
  const Stepper stepper(kernel, cfg);
  const auto m = static_cast<std::size_t>(cfg.cells);
  if (init.u.size() != m) {
    throw Error(ErrorKind::invalid_argument, "initial state size does not match the configuration");
  }
  if (std::abs(init.u.front() - cfg.u_left) > kFarFieldTol ||
      std::abs(init.u.back() - cfg.u_right) > kFarFieldTol) {
    std::ostringstream msg;
    msg << "initial data does not match the far fields: u(a)=" << init.u.front()
        << " vs u_left=" << cfg.u_left << ", u(b)=" << init.u.back()
        << " vs u_right=" << cfg.u_right;
    throw Error(ErrorKind::precondition, msg.str());
  }
  const auto [lo_it, hi_it] = std::minmax_element(init.u.begin(), init.u.end());
  const double lo = std::min({cfg.u_left, cfg.u_right, *lo_it}) - kBandSlack;
  const double hi = std::max({cfg.u_left, cfg.u_right, *hi_it}) + kBandSlack;

  Trajectory out;
  out.config = cfg;
  out.x = cfg.centers();
  auto record = [&](const SimState& s) {
    out.snapshots.push_back({s.t, s.u, max_slope(s.u, cfg.dx()), total_variation(s.u)});
  };

  SimState state = init;
  state.t = 0.0;
  record(state);
  int next_snapshot = 1;
  // Snapshot times are k * interval, plus T itself.
  auto snapshot_time = [&](int k) { return std::min(k * cfg.snapshot_interval, cfg.t_end); };
  while (state.t < cfg.t_end) {
    const double target = snapshot_time(next_snapshot);
    double dt = stable_dt(state, cfg);
    bool lands = false;
    if (state.t + dt >= target * (1.0 - 1e-14)) {
      dt = target - state.t;
      lands = true;
    }
    state = stepper.step(state, dt);
    ++out.steps;
    for (std::size_t j = 0; j < m; ++j) {
      if (state.u[j] < lo || state.u[j] > hi) {
        std::ostringstream msg;
        msg << "simulation left the band [" << lo << ", " << hi << "]: u=" << state.u[j]
            << " at x=" << out.x[j] << ", t=" << state.t;
        throw Error(ErrorKind::invariant_violation, msg.str());
      }
    }
    if (lands) {
      state.t = target;
      record(state);
      ++next_snapshot;
    }
  }
  return out;
}

double level_crossing(std::span<const double> x, std::span<const double> u, double level) {
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double d0 = u[j] - level;
    const double d1 = u[j + 1] - level;
    if (d0 == 0.0) return x[j];
    if ((d0 < 0.0) != (d1 < 0.0) && d1 != 0.0) {
      return x[j] + (x[j + 1] - x[j]) * d0 / (d0 - d1);
    }
    if (d1 == 0.0) return x[j + 1];
  }
  std::ostringstream msg;
  msg << "level " << level << " is not crossed";
  throw Error(ErrorKind::precondition, msg.str());
}

SpeedEstimate measure_speed(const Trajectory& trajectory, double level) {
  const SimConfig& cfg = trajectory.config;
  const double lo = std::min(cfg.u_left, cfg.u_right);
  const double hi = std::max(cfg.u_left, cfg.u_right);
  if (!(level > lo && level < hi)) {
    throw Error(ErrorKind::precondition, "speed level must lie strictly between the far fields");
  }
  if (trajectory.snapshots.size() < 5) {
    throw Error(ErrorKind::precondition, "speed measurement needs at least 5 snapshots");
  }
  SpeedEstimate est;
  for (const Snapshot& snap : trajectory.snapshots) {
    est.times.push_back(snap.t);
    est.positions.push_back(level_crossing(trajectory.x, snap.u, level));
  }
  const auto n = static_cast<double>(est.times.size());
  double mt = 0.0, mp = 0.0;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    mt += est.times[k];
    mp += est.positions[k];
  }
  mt /= n;
  mp /= n;
  double stt = 0.0, stp = 0.0;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    stt += (est.times[k] - mt) * (est.times[k] - mt);
    stp += (est.times[k] - mt) * (est.positions[k] - mp);
  }
  est.speed = stp / stt;
  est.intercept = mp - est.speed * mt;
  double sq = 0.0;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    const double r = est.positions[k] - (est.intercept + est.speed * est.times[k]);
    sq += r * r;
    est.max_residual = std::max(est.max_residual, std::abs(r));
  }
  est.rms_residual = std::sqrt(sq / n);
  return est;
}

double l1_translate_error(const Trajectory& trajectory, const Snapshot& snapshot,
                          const std::function<double(double)>& profile, double speed) {
  const double shift = speed * snapshot.t;
  double sum = 0.0;
  for (std::size_t j = 0; j < snapshot.u.size(); ++j) {
    sum += std::abs(snapshot.u[j] - profile(trajectory.x[j] - shift));
  }
  return sum * trajectory.config.dx();
}

double l1_translate_error(const Trajectory& trajectory, const Snapshot& snapshot,
                          const WaveProfile& profile) {
  return l1_translate_error(
      trajectory, snapshot, [&](double x) { return profile.evaluate(x); },
      profile.params.speed());
}

}  // namespace nlb
