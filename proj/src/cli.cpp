#include "nlb/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlb/cauchy.hpp"
#include "nlb/error.hpp"
#include "nlb/format.hpp"
#include "nlb/io.hpp"

namespace nlb::cli {

using Json = nlohmann::ordered_json;

namespace {

const char* const kCommands[] = {"solve", "classify", "sweep", "simulate", "kernel-validate"};

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::invalid_argument, what);
}

// The output directory is left out of echoes so runs written to different
// places stay byte-identical.
Json config_json(const RunConfig& c, bool with_out_dir = false) {
  Json j;
  j["command"] = c.command;
  j["kernel"] = c.kernel;
  j["u_minus"] = c.u_minus;
  j["u_plus"] = c.u_plus;
  j["length"] = c.length ? Json(*c.length) : Json(nullptr);
  j["cells"] = c.cells ? Json(*c.cells) : Json(nullptr);
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["path"] = c.path;
  j["classify"] = c.classify;
  j["kernels"] = c.kernels;
  j["amplitudes"] = c.amplitudes;
  j["center"] = c.center;
  j["jobs"] = c.jobs;
  j["sim_a"] = c.sim_a;
  j["sim_b"] = c.sim_b;
  j["sim_cells"] = c.sim_cells;
  j["cfl"] = c.cfl;
  j["t_end"] = c.t_end;
  j["snapshot_interval"] = c.snapshot_interval;
  j["init"] = c.init;
  j["init_from"] = c.init_from;
  j["probes"] = c.probes;
  j["seed"] = c.seed;
  if (with_out_dir) j["out_dir"] = c.out_dir;
  return j;
}

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

void report_error(std::ostream& err, ErrorKind kind, const std::string& message) {
  Json j;
  j["error"]["kind"] = std::string(error_kind_name(kind));
  j["error"]["message"] = message;
  err << j.dump() << '\n';
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
  } catch (const std::exception& e) {
    report_error(err, ErrorKind::invalid_argument, e.what());
  }
  return kExitError;
}

ConvolutionPath parse_path(const std::string& path) {
  if (path == "fft") return ConvolutionPath::fft;
  if (path == "direct") return ConvolutionPath::direct;
  invalid("path must be 'fft' or 'direct', got '" + path + "'");
}

Json residuals_json(const WaveProfile& profile, const Kernel& kernel) {
  Json j;
  j["pointwise"] = pointwise_residual(profile, kernel).residual;
  j["weak"] = weak_residual(profile, kernel);
  j["flux_balance"] = flux_balance(profile, kernel);
  return j;
}

Json classification_json(const ShockClassification& c, const Kernel& kernel) {
  Json j;
  j["predicted_by_theorem"] = c.predicted_by_theorem;
  j["threshold"] = c.threshold;
  j["m1"] = kernel.moments().m1;
  j["measured"] = std::string(shock_class_name(c.measured));
  j["cells"] = c.cells;
  j["jumps"] = c.jumps;
  j["ratios"] = Json::array();
  for (double r : c.ratios) j["ratios"].push_back(std::isfinite(r) ? Json(r) : Json("inf"));
  j["finest_spacing"] = c.finest_spacing;
  j["length"] = c.length;
  j["all_converged"] = c.all_converged;
  j["consistent"] = c.consistent;
  return j;
}

}  // namespace

std::vector<double> log_space(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) invalid("log_space needs 0 < lo <= hi and count >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = lo * std::exp(k * step);
  v.back() = hi;
  return v;
}

RunConfig resolve(RunConfig c) {
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands)) {
    invalid("unknown command '" + c.command + "'");
  }
  parse_path(c.path);
  if (!c.cells) c.cells = (c.command == "solve") ? 4096 : 1024;
  if (*c.cells < 64) invalid("cells must be at least 64");
  if (c.command == "solve" && c.classify && *c.cells / 4 < 64) {
    invalid("--classify needs cells >= 256 (the coarsest grid has cells / 4)");
  }
  if ((c.command == "classify" || c.command == "sweep") && *c.cells > 2500) {
    invalid("classification base cells must not exceed 2500 (the finest grid uses 4x)");
  }
  if (!(c.tol > 0.0)) invalid("tol must be positive");
  if (c.max_iter < 1) invalid("max_iter must be at least 1");
  if (c.length && !(*c.length > 0.0)) invalid("length must be positive");
  if (c.jobs < 0) invalid("jobs must be nonnegative");
  if (c.probes < 16) invalid("probes must be at least 16");
  if (c.command == "sweep") {
    if (c.kernels.empty()) c.kernels.push_back(c.kernel);
    if (c.amplitudes.empty()) invalid("sweep needs a nonempty amplitude list");
    for (double a : c.amplitudes) {
      if (!(a > 0.0) || !std::isfinite(a)) invalid("sweep amplitudes must be positive");
    }
  }
  if ((c.command == "solve" || c.command == "classify") && !c.length) {
    c.length = default_length(build_kernel(c.kernel), WaveParams(c.u_minus, c.u_plus));
  }
  if (c.command == "simulate" && !c.init_from.empty()) c.init = "profile";
  return c;
}

std::string to_json(const RunConfig& config) { return config_json(config, true).dump(2); }

RunConfig config_from_json(const std::string& text, RunConfig base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");
  RunConfig& c = base;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const Json& v = it.value();
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "kernel") c.kernel = v.get<std::string>();
      else if (key == "u_minus") c.u_minus = v.get<double>();
      else if (key == "u_plus") c.u_plus = v.get<double>();
      else if (key == "length") c.length = v.is_null() ? std::nullopt : std::optional(v.get<double>());
      else if (key == "cells") c.cells = v.is_null() ? std::nullopt : std::optional(v.get<int>());
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "max_iter") c.max_iter = v.get<int>();
      else if (key == "path") c.path = v.get<std::string>();
      else if (key == "classify") c.classify = v.get<bool>();
      else if (key == "kernels") c.kernels = v.get<std::vector<std::string>>();
      else if (key == "amplitudes") c.amplitudes = v.get<std::vector<double>>();
      else if (key == "center") c.center = v.get<double>();
      else if (key == "jobs") c.jobs = v.get<int>();
      else if (key == "sim_a") c.sim_a = v.get<double>();
      else if (key == "sim_b") c.sim_b = v.get<double>();
      else if (key == "sim_cells") c.sim_cells = v.get<int>();
      else if (key == "cfl") c.cfl = v.get<double>();
      else if (key == "t_end") c.t_end = v.get<double>();
      else if (key == "snapshot_interval") c.snapshot_interval = v.get<double>();
      else if (key == "init") c.init = v.get<std::string>();
      else if (key == "init_from") c.init_from = v.get<std::string>();
      else if (key == "probes") c.probes = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else invalid("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.length = c.length;
  o.cells = c.cells.value_or(4096);
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.path = parse_path(c.path);
  return o;
}

int cmd_solve(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Kernel kernel = build_kernel(config.kernel);
    const WaveParams params(config.u_minus, config.u_plus);
    SolverOptions opts = solver_options(config);

    WaveSolution solution = [&] {
      if (!config.classify) return solve_wave(kernel, params, opts);
      opts.cells /= 4;
      ShockClassification c = classify_shock(kernel, params, opts);
      return std::move(*c.finest);
    }();
    const WaveProfile& p = solution.profile;

    Json meta;
    meta["config"] = config_json(config);
    meta["kernel"] = config.kernel;
    meta["u_minus"] = params.u_minus();
    meta["u_plus"] = params.u_plus();
    meta["s"] = params.speed();
    meta["u_c"] = params.half_amplitude();
    meta["L"] = p.grid.length();
    meta["N"] = p.grid.cells();
    meta["iterations"] = p.iterations;
    meta["converged"] = p.converged;
    meta["final_sup_diff"] = p.final_sup_diff;
    meta["jump"] = p.jump();
    meta["classification"] = std::string(shock_class_name(p.classification));
    meta["subsolution_epsilon"] = solution.subsolution.epsilon;
    meta["residuals"] = residuals_json(p, kernel);

    io::write_profile_csv(out_path(config, "profile.csv"), p);
    io::write_trace_csv(out_path(config, "trace.csv"), solution.trace);
    io::write_text(out_path(config, "profile.meta.json"), meta.dump(2) + '\n');
    return p.converged ? kExitOk : kExitIndeterminate;
  });
}

int cmd_classify(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Kernel kernel = build_kernel(config.kernel);
    const WaveParams params(config.u_minus, config.u_plus);
    const ShockClassification c = classify_shock(kernel, params, solver_options(config));
    Json j;
    j["config"] = config_json(config);
    j["kernel"] = config.kernel;
    j["u_minus"] = params.u_minus();
    j["u_plus"] = params.u_plus();
    j["amplitude"] = params.amplitude();
    const Json details = classification_json(c, kernel);
    for (const auto& [key, value] : details.items()) j[key] = value;
    io::write_text(out_path(config, "classification.json"), j.dump(2) + '\n');
    return c.measured == ShockClass::indeterminate ? kExitIndeterminate : kExitOk;
  });
}

namespace {

struct SweepRow {
  std::string kernel;
  double amplitude = 0.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double threshold = 0.0;
  bool predicted = false;
  std::string classification;
  double jump = 0.0;
  int iterations = 0;
  bool converged = false;
  double pointwise = 0.0;
  double weak = 0.0;
  double flux = 0.0;
  std::string status = "ok";
  std::string message;
};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

SweepRow sweep_row(const RunConfig& config, const std::string& spec, double amplitude) {
  SweepRow row;
  row.kernel = spec;
  row.amplitude = amplitude;
  row.u_minus = config.center + 0.5 * amplitude;
  row.u_plus = config.center - 0.5 * amplitude;
  try {
    const Kernel kernel = build_kernel(spec);
    const WaveParams params(row.u_minus, row.u_plus);
    const ShockClassification c = classify_shock(kernel, params, solver_options(config));
    const WaveProfile& p = c.finest->profile;
    row.threshold = c.threshold;
    row.predicted = c.predicted_by_theorem;
    row.classification = std::string(shock_class_name(c.measured));
    row.jump = p.jump();
    row.iterations = p.iterations;
    row.converged = c.all_converged;
    row.pointwise = pointwise_residual(p, kernel).residual;
    row.weak = weak_residual(p, kernel);
    row.flux = flux_balance(p, kernel);
  } catch (const Error& e) {
    row.status = std::string(error_kind_name(e.kind()));
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  return row;
}

}  // namespace

int cmd_sweep(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    struct Task {
      std::string kernel;
      double amplitude;
    };
    std::vector<Task> tasks;
    for (const std::string& spec : config.kernels) {
      for (double a : config.amplitudes) tasks.push_back({spec, a});
    }
    std::vector<SweepRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min<std::size_t>(tasks.size(), config.jobs > 0 ? static_cast<std::size_t>(config.jobs) : hw);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
          rows[k] = sweep_row(config, tasks[k].kernel, tasks[k].amplitude);
        }
      });
    }
    for (auto& t : pool) t.join();

    std::string text =
        "kernel,amplitude,u_minus,u_plus,threshold,predicted_by_theorem,classification,jump,"
        "iterations,converged,pointwise_residual,weak_residual,flux_balance,status,message\n";
    std::size_t failures = 0;
    for (const SweepRow& r : rows) {
      if (r.status != "ok") ++failures;
      text += csv_field(r.kernel) + ',' + format_double(r.amplitude) + ',' +
              format_double(r.u_minus) + ',' + format_double(r.u_plus) + ',' +
              format_double(r.threshold) + ',' + (r.predicted ? "true" : "false") + ',' +
              r.classification + ',' + format_double(r.jump) + ',' + std::to_string(r.iterations) +
              ',' + (r.converged ? "true" : "false") + ',' + format_double(r.pointwise) + ',' +
              format_double(r.weak) + ',' + format_double(r.flux) + ',' + r.status + ',' +
              csv_field(r.message) + '\n';
    }
    io::write_text(out_path(config, "sweep.csv"), text);
    if (failures == rows.size()) {
      report_error(err, ErrorKind::invalid_argument, "every sweep row failed");
      return kExitError;
    }
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Kernel kernel = build_kernel(config.kernel);
    SimConfig sim;
    sim.a = config.sim_a;
    sim.b = config.sim_b;
    sim.cells = config.sim_cells;
    sim.cfl = config.cfl;
    sim.t_end = config.t_end;
    sim.snapshot_interval = config.snapshot_interval;
    sim.path = parse_path(config.path);
    sim.u_left = config.u_minus;
    sim.u_right = config.u_plus;

    std::optional<io::SampledProfile> profile;
    SimState init;
    if (config.init == "profile") {
      if (config.init_from.empty()) invalid("init 'profile' needs --init-from");
      profile = io::read_profile_csv(config.init_from);
      if (profile->x.front() < sim.a || profile->x.back() > sim.b) {
        std::ostringstream msg;
        msg << "profile spans [" << profile->x.front() << ", " << profile->x.back()
            << "], which does not fit in the simulation domain [" << sim.a << ", " << sim.b << "]";
        invalid(msg.str());
      }
      sim.u_left = profile->u_left();
      sim.u_right = profile->u_right();
      init = sample_state(sim, [&](double x) { return (*profile)(x); });
    } else if (config.init == "riemann") {
      const double ul = sim.u_left, ur = sim.u_right;
      init = sample_state(sim, [=](double x) { return x < 0.0 ? ul : (x > 0.0 ? ur : 0.5 * (ul + ur)); });
    } else if (config.init == "constant") {
      if (sim.u_left != sim.u_right) invalid("constant init needs u_minus == u_plus");
      init = constant_state(sim, sim.u_left);
    } else if (config.init.rfind("tanh:", 0) == 0) {
      double steepness = 0.0;
      try {
        std::size_t used = 0;
        steepness = std::stod(config.init.substr(5), &used);
        if (used != config.init.size() - 5) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        invalid("init 'tanh:<steepness>' needs a number, got '" + config.init + "'");
      }
      if (!(steepness > 0.0)) invalid("tanh steepness must be positive");
      const double s = 0.5 * (sim.u_left + sim.u_right);
      const double uc = 0.5 * (sim.u_left - sim.u_right);
      init = sample_state(sim, [=](double x) { return s - uc * std::tanh(steepness * x); });
    } else {
      invalid("unknown init '" + config.init + "' (riemann, constant, tanh:<k>, profile)");
    }

    const Trajectory trajectory = simulate(init, kernel, sim);

    Json diag;
    diag["config"] = config_json(config);
    diag["u_left"] = sim.u_left;
    diag["u_right"] = sim.u_right;
    diag["steps"] = trajectory.steps;
    Json series = Json::array();
    for (const Snapshot& snap : trajectory.snapshots) {
      series.push_back({{"t", snap.t}, {"max_slope", snap.max_slope},
                        {"total_variation", snap.total_variation}});
    }
    diag["max_slope"] = series;
    const double initial_slope = trajectory.snapshots.front().max_slope;
    double peak_slope = 0.0;
    for (const Snapshot& snap : trajectory.snapshots) peak_slope = std::max(peak_slope, snap.max_slope);
    diag["max_slope_growth"] = initial_slope > 0.0 ? Json(peak_slope / initial_slope) : Json(nullptr);
    const double s = 0.5 * (sim.u_left + sim.u_right);
    diag["expected_speed"] = s;
    if (sim.u_left != sim.u_right && trajectory.snapshots.size() >= 5) {
      const SpeedEstimate est = measure_speed(trajectory, s);
      diag["measured_speed"] = est.speed;
      diag["speed_fit_rms_residual"] = est.rms_residual;
    } else {
      diag["measured_speed"] = nullptr;
      diag["speed_fit_rms_residual"] = nullptr;
    }
    if (profile) {
      diag["L1_error_vs_translate"] = l1_translate_error(
          trajectory, trajectory.snapshots.back(), [&](double x) { return (*profile)(x); },
          profile->speed());
    } else {
      diag["L1_error_vs_translate"] = nullptr;
    }
    io::write_snapshots_csv(out_path(config, "snapshots.csv"), trajectory);
    io::write_text(out_path(config, "diagnostics.json"), diag.dump(2) + '\n');
    return kExitOk;
  });
}

int cmd_kernel_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string_view spec = config.kernel;
    Kernel kernel = [&] {
      if (spec.rfind("table:", 0) != 0) return build_kernel(spec);
      // Tables are read leniently so defects show up in the report.
      std::string path(spec.substr(6));
      TableOptions options;
      options.strict = false;
      const std::string suffix = ":renorm";
      if (path.size() > suffix.size() && path.ends_with(suffix)) {
        path.resize(path.size() - suffix.size());
        options.renormalize = true;
      }
      return read_kernel_table(path, options);
    }();
    const KernelReport report = validate_kernel(kernel, config.probes);
    Json j;
    j["config"] = config_json(config);
    j["kernel"] = config.kernel;
    j["m1"] = kernel.moments().m1;
    j["m2"] = kernel.moments().m2;
    j["all_passed"] = report.all_passed();
    j["checks"] = Json::array();
    for (const KernelCheck& c : report.checks) {
      j["checks"].push_back({{"name", c.name},
                             {"passed", c.passed},
                             {"advisory", c.advisory},
                             {"worst_violation", c.worst_violation},
                             {"note", c.note}});
    }
    const std::string text = j.dump(2) + '\n';
    io::write_text(out_path(config, "kernel_report.json"), text);
    out << text;
    return report.all_passed() ? kExitOk : kExitIndeterminate;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traveling waves of the nonlocal Burgers equation u_t + u u_x + u - K*u = 0"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> kernel, path, init, init_from, out_dir;
  std::optional<double> u_minus, u_plus, length, tol, center, sim_a, sim_b, cfl, t_end, interval;
  std::optional<int> cells, max_iter, jobs, sim_cells, probes;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> kernels;
  std::vector<double> amplitudes, amplitude_range;
  bool classify = false;

  app.add_option("--config", config_path, "JSON run configuration; flags override it");
  app.add_option("--kernel", kernel, "exp:k=1, gauss:sigma=1, uniform:a=1, tri:a=1, table:path.csv[:renorm]");
  app.add_option("--u-minus", u_minus, "left far-field state");
  app.add_option("--u-plus", u_plus, "right far-field state");
  app.add_option("--length", length, "half-line truncation L");
  app.add_option("--cells", cells, "half-line cells N (base N for classify and sweep)");
  app.add_option("--tol", tol, "iteration tolerance on sup |u_{n+1} - u_n|");
  app.add_option("--max-iter", max_iter, "iteration cap");
  app.add_option("--path", path, "convolution path: fft or direct");
  app.add_flag("--classify", classify, "solve: classify over N/4, N/2, N and tag the profile");
  app.add_option("--kernels", kernels, "sweep: kernel specs");
  app.add_option("--amplitudes", amplitudes, "sweep: amplitudes u_minus - u_plus");
  app.add_option("--amplitude-range", amplitude_range, "sweep: LO HI COUNT, log-spaced")->expected(3);
  app.add_option("--center", center, "sweep: wave speed s");
  app.add_option("--jobs", jobs, "sweep: worker threads (0 = all cores)");
  app.add_option("--a", sim_a, "simulate: left end of the domain");
  app.add_option("--b", sim_b, "simulate: right end of the domain");
  app.add_option("--sim-cells", sim_cells, "simulate: cell count M");
  app.add_option("--cfl", cfl, "simulate: CFL number");
  app.add_option("--t-end", t_end, "simulate: end time T");
  app.add_option("--snapshot-interval", interval, "simulate: time between snapshots");
  app.add_option("--init", init, "simulate: riemann, constant, tanh:<k> or profile");
  app.add_option("--init-from", init_from, "simulate: profile.csv from solve");
  app.add_option("--probes", probes, "kernel-validate: probe count");
  app.add_option("--seed", seed, "seed recorded with the run");
  app.add_option("--out", out_dir, "output directory");

  for (const char* name : kCommands) app.add_subcommand(name, "");
  app.get_subcommand("solve")->description("compute a wave profile");
  app.get_subcommand("classify")->description("classify the wave over N, 2N, 4N");
  app.get_subcommand("sweep")->description("classify over kernels x amplitudes");
  app.get_subcommand("simulate")->description("run the time-dependent equation");
  app.get_subcommand("kernel-validate")->description("check the kernel hypotheses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, ErrorKind::invalid_argument, e.what());
    return kExitError;
  }

  RunConfig config;
  const int status = guarded(err, [&] {
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw Error(ErrorKind::io, "cannot open config " + config_path);
      std::stringstream buffer;
      buffer << file.rdbuf();
      config = config_from_json(buffer.str());
    }
    config.command = app.get_subcommands().front()->get_name();
    if (kernel) config.kernel = *kernel;
    if (u_minus) config.u_minus = *u_minus;
    if (u_plus) config.u_plus = *u_plus;
    if (length) config.length = *length;
    if (cells) config.cells = *cells;
    if (tol) config.tol = *tol;
    if (max_iter) config.max_iter = *max_iter;
    if (path) config.path = *path;
    if (classify) config.classify = true;
    if (!kernels.empty()) config.kernels = kernels;
    if (!amplitudes.empty()) config.amplitudes = amplitudes;
    if (!amplitude_range.empty()) {
      const double count = amplitude_range[2];
      if (count != std::floor(count) || count < 1) invalid("amplitude-range COUNT must be a positive integer");
      config.amplitudes = log_space(amplitude_range[0], amplitude_range[1], static_cast<int>(count));
    }
    if (center) config.center = *center;
    if (jobs) config.jobs = *jobs;
    if (sim_a) config.sim_a = *sim_a;
    if (sim_b) config.sim_b = *sim_b;
    if (sim_cells) config.sim_cells = *sim_cells;
    if (cfl) config.cfl = *cfl;
    if (t_end) config.t_end = *t_end;
    if (interval) config.snapshot_interval = *interval;
    if (init) config.init = *init;
    if (init_from) config.init_from = *init_from;
    if (probes) config.probes = *probes;
    if (seed) config.seed = *seed;
    if (out_dir) config.out_dir = *out_dir;
    config = resolve(config);
    return kExitOk;
  });
  if (status != kExitOk) return status;

  if (config.command == "solve") return cmd_solve(config, err);
  if (config.command == "classify") return cmd_classify(config, err);
  if (config.command == "sweep") return cmd_sweep(config, err);
  if (config.command == "simulate") return cmd_simulate(config, err);
  return cmd_kernel_validate(config, out, err);
}

}  // namespace nlb::cli
