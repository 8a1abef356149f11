#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nlb/cauchy.hpp"
#include "nlb/error.hpp"
#include "nlb/kernel.hpp"
#include "nlb/waves.hpp"

using namespace nlb;

namespace {

SimConfig config(double u_left, double u_right, int cells = 800, double t_end = 5.0) {
  SimConfig cfg;
  cfg.cells = cells;
  cfg.u_left = u_left;
  cfg.u_right = u_right;
  cfg.t_end = t_end;
  return cfg;
}

double mass(const SimState& s, double dx) {
  return dx * std::accumulate(s.u.begin(), s.u.end(), 0.0);
}

}  // namespace

TEST_CASE("configuration checks") {
  SimConfig cfg = config(0.0, 0.0);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.dx() == doctest::Approx(0.1));
  CHECK(cfg.center(0) == doctest::Approx(-39.95));
  CHECK(cfg.centers().size() == 800);
  cfg.cfl = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(0.0, 0.0, 64);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(0.0, 0.0);
  cfg.b = cfg.a;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(0.0, 0.0);
  cfg.t_end = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("rusanov flux") {
  CHECK(rusanov_flux(1.0, 1.0) == 0.5);
  CHECK(rusanov_flux(2.0, 0.0) == doctest::Approx(0.25 * 4.0 + 0.5 * 2.0 * 2.0));
  CHECK(rusanov_flux(-1.0, 1.0) == doctest::Approx(0.5 - 1.0));
  CHECK(rusanov_flux(0.3, -0.7) == doctest::Approx(0.25 * (0.09 + 0.49) + 0.5 * 0.7 * 1.0));
}

TEST_CASE("stable time step") {
  const SimConfig cfg = config(2.0, -3.0);
  SimState s = sample_state(cfg, [](double x) { return x < 0 ? 2.0 : -3.0; });
  CHECK(stable_dt(s, cfg) == doctest::Approx(0.4 * cfg.dx() / 3.0));
  s = constant_state(cfg, 0.0);
  CHECK(stable_dt(s, cfg) == 0.5);
}

TEST_CASE("constant states are steady") {
  for (const Kernel& k : {Kernel::exponential(1.0), Kernel::gaussian(1.0), Kernel::uniform(1.0),
                          Kernel::triangular(1.0)}) {
    for (double c : {1.0, -0.4, 2.5}) {
      const SimConfig cfg = config(c, c);
      const Stepper stepper(k, cfg);
      SimState s = constant_state(cfg, c);
      for (int n = 0; n < 100; ++n) s = stepper.step(s);
      double worst = 0.0;
      for (double v : s.u) worst = std::max(worst, std::abs(v - c));
      CHECK(worst <= 1e-12);
      CHECK(s.t > 0.0);
    }
  }
}

TEST_CASE("one step by hand") {
  const Kernel k = Kernel::exponential(1.0);
  SimConfig cfg = config(1.0, -1.0, 256);
  const SimState s = sample_state(cfg, [](double x) { return -std::tanh(x); });
  const Stepper stepper(k, cfg);
  const double dt = 0.01;
  const SimState next = stepper.step(s, dt);
  const auto ku = stepper.source_convolution(s.u);
  const std::size_t m = s.u.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double left = j == 0 ? cfg.u_left : s.u[j - 1];
    const double right = j + 1 == m ? cfg.u_right : s.u[j + 1];
    const double expected = s.u[j] -
                            dt / cfg.dx() * (rusanov_flux(s.u[j], right) - rusanov_flux(left, s.u[j])) +
                            dt * (ku[j] - s.u[j]);
    CHECK(next.u[j] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(next.t == doctest::Approx(0.01));
  CHECK(step(s, k, cfg).t == doctest::Approx(stable_dt(s, cfg)));
}

TEST_CASE("source convolution matches the full-line oracle") {
  const Kernel k = Kernel::gaussian(1.0);
  SimConfig cfg = config(1.0, 0.0, 400);
  const SimState s = sample_state(cfg, [](double x) { return 0.5 * std::erfc(x); });
  const auto ku = Stepper(k, cfg).source_convolution(s.u);
  const auto ref = full_line_convolve(k, cfg.center(0), cfg.center(cfg.cells - 1), s.u, 1.0, 0.0);
  for (std::size_t j = 0; j < ku.size(); ++j) CHECK(std::abs(ku[j] - ref[j]) <= 1e-12);
}

TEST_CASE("speed of an exact translating ramp") {
  const double speed = 0.7;
  Trajectory traj;
  traj.config = config(1.0, 0.0);
  traj.x = traj.config.centers();
  for (int n = 0; n <= 10; ++n) {
    Snapshot snap;
    snap.t = 0.5 * n;
    for (double x : traj.x) {
      snap.u.push_back(std::clamp(0.5 - 0.1 * (x - speed * snap.t), 0.0, 1.0));
    }
    traj.snapshots.push_back(snap);
  }
  const SpeedEstimate est = measure_speed(traj, 0.5);
  CHECK(std::abs(est.speed - speed) <= 1e-10);
  CHECK(std::abs(est.intercept) <= 1e-10);
  CHECK(est.max_residual <= 1e-10);
  CHECK(est.times.size() == 11);
  CHECK_THROWS_AS(measure_speed(traj, 1.5), Error);
  traj.snapshots.resize(4);
  CHECK_THROWS_AS(measure_speed(traj, 0.5), Error);
}

TEST_CASE("level crossing") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> u = {1.0, 0.8, 0.2, 0.0};
  CHECK(level_crossing(x, u, 0.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(level_crossing(x, u, 2.0), Error);
}

TEST_CASE("riemann data travels at the Rankine-Hugoniot speed") {
  const Kernel k = Kernel::exponential(1.0);
  SimConfig cfg = config(2.0, 0.0, 1600, 8.0);
  const SimState init = sample_state(cfg, [](double x) { return x < 0 ? 2.0 : 0.0; });
  const Trajectory traj = simulate(init, k, cfg);
  CHECK(traj.snapshots.size() == 17);
  CHECK(traj.snapshots.back().t == doctest::Approx(8.0).epsilon(1e-14));
  const SpeedEstimate est = measure_speed(traj, 1.0);
  CHECK(est.speed == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("a solved stationary wave stays put") {
  const Kernel k = Kernel::exponential(1.0);
  SolverOptions opts;
  opts.cells = 2048;
  const WaveProfile w = solve_wave(k, WaveParams(1.0, -1.0), opts).profile;
  const SimConfig cfg = config(1.0, -1.0, 1600);
  const Trajectory traj = simulate(state_from_profile(cfg, w), k, cfg);
  const SpeedEstimate est = measure_speed(traj, 0.5);
  CHECK(std::abs(est.speed) <= 0.01);
  CHECK(l1_translate_error(traj, traj.snapshots.back(), w) <= 0.2);
  CHECK(l1_translate_error(traj, traj.snapshots.front(), w) <= 1e-2);
}

TEST_CASE("mass is conserved away from the boundaries") {
  const Kernel k = Kernel::gaussian(1.0);
  const SimConfig cfg = config(0.0, 0.0, 800, 3.0);
  const SimState init = sample_state(cfg, [](double x) { return std::exp(-x * x); });
  const Trajectory traj = simulate(init, k, cfg);
  const double m0 = mass(init, cfg.dx());
  for (const Snapshot& snap : traj.snapshots) {
    CHECK(std::abs(mass(SimState{snap.u, snap.t}, cfg.dx()) - m0) <= 1e-9);
  }
}

TEST_CASE("odd data stay odd") {
  const Kernel k = Kernel::triangular(1.0);
  const SimConfig cfg = config(1.0, -1.0, 800, 3.0);
  const Trajectory traj = simulate(sample_state(cfg, [](double x) { return -std::tanh(x); }), k, cfg);
  const auto& u = traj.snapshots.back().u;
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(std::abs(u[j] + u[u.size() - 1 - j]) <= 1e-10);
}

TEST_CASE("steep data steepen") {
  const Kernel k = Kernel::exponential(1.0);
  std::vector<double> growth;
  for (int cells : {1000, 2000}) {
    const SimConfig cfg = config(2.0, -2.0, cells);
    const Trajectory traj =
        simulate(sample_state(cfg, [](double x) { return -2.0 * std::tanh(3.0 * x); }), k, cfg);
    double peak = 0.0;
    for (const Snapshot& snap : traj.snapshots) peak = std::max(peak, snap.max_slope);
    growth.push_back(peak / traj.snapshots.front().max_slope);
    for (const Snapshot& snap : traj.snapshots) {
      CHECK(snap.total_variation <= traj.snapshots.front().total_variation + 1e-9);
    }
  }
  CHECK(growth[0] >= 3.0);
  CHECK(growth[1] >= growth[0]);
}

TEST_CASE("slope and variation") {
  const std::vector<double> u = {0.0, 1.0, 3.0, 2.0};
  CHECK(max_slope(u, 0.5) == 4.0);
  CHECK(total_variation(u) == 4.0);
}

TEST_CASE("far-field mismatch is rejected") {
  const Kernel k = Kernel::exponential(1.0);
  const SimConfig cfg = config(1.0, -1.0);
  try {
    simulate(constant_state(cfg, 1.0), k, cfg);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}
