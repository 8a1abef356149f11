// Command-line front end: run configuration, file outputs and subcommands.
//
// A run is described by a flat RunConfig that can be loaded from JSON and
// overridden by flags. Every output sidecar embeds the resolved config.
// Exit codes: 0 success, 1 error, 2 indeterminate (no convergence or an
// indeterminate classification).

#ifndef NLB_CLI_HPP_
#define NLB_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlb/kernel.hpp"
#include "nlb/waves.hpp"

namespace nlb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIndeterminate = 2;

struct RunConfig {
  std::string command;
  std::string kernel = "exp:k=1";
  double u_minus = 1.0;
  double u_plus = -1.0;

  // Wave solver.
  std::optional<double> length;  // automatic when empty
  std::optional<int> cells;      // 4096 for solve, 1024 (base) for classify/sweep
  double tol = 1e-8;
  int max_iter = 5000;
  std::string path = "fft";  // "fft" or "direct"
  bool classify = false;     // solve: refine N/4, N/2, N and tag the profile

  // Sweep.
  std::vector<std::string> kernels;
  std::vector<double> amplitudes;
  double center = 0.0;  // speed s of every swept wave
  int jobs = 0;         // worker threads; 0 means hardware concurrency

  // Simulation.
  double sim_a = -40.0;
  double sim_b = 40.0;
  int sim_cells = 2000;
  double cfl = 0.4;
  double t_end = 5.0;
  double snapshot_interval = 0.5;
  std::string init = "riemann";  // riemann | constant | tanh:<steepness> | profile
  std::string init_from;         // profile.csv written by solve

  // kernel-validate.
  int probes = 256;

  std::uint64_t seed = 1;
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

// Fills command-dependent defaults and checks ranges. Throws
// Error(invalid_argument).
RunConfig resolve(RunConfig config);

std::string to_json(const RunConfig& config);
// Keys absent from the JSON keep the values of base; unknown keys throw.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

SolverOptions solver_options(const RunConfig& config);

// Log-spaced values lo..hi inclusive.
std::vector<double> log_space(double lo, double hi, int count);

// Subcommands; config must be resolved. Errors are reported on err as a
// JSON object {"error": {"kind", "message"}}.
int cmd_solve(const RunConfig& config, std::ostream& err);
int cmd_classify(const RunConfig& config, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& err);
int cmd_kernel_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlb::cli

#endif  // NLB_CLI_HPP_
