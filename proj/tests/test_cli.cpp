#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "nlb/cli.hpp"
#include "nlb/error.hpp"

using namespace nlb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nlb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nlb_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  REQUIRE(file);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void check_error_json(const std::string& text, const std::string& kind) {
  const json j = json::parse(text);
  REQUIRE(j.contains("error"));
  CHECK(j["error"]["kind"] == kind);
  CHECK(j["error"]["message"].get<std::string>().size() > 0);
}

}  // namespace

TEST_CASE("config round trip") {
  cli::RunConfig c;
  c.command = "sweep";
  c.kernel = "gauss:sigma=2";
  c.u_minus = 3.5;
  c.u_plus = 0.25;
  c.length = 42.0;
  c.cells = 512;
  c.kernels = {"exp:k=1", "tri:a=1"};
  c.amplitudes = {0.5, 1.0 / 3.0};
  c.jobs = 3;
  c.init = "tanh:2";
  c.seed = 123456789012345ULL;
  c.out_dir = "somewhere";
  CHECK(cli::config_from_json(cli::to_json(c)) == c);

  cli::RunConfig empty;
  CHECK(cli::config_from_json("{}") == empty);
  CHECK_THROWS_AS(cli::config_from_json(R"({"kernal": "exp:k=1"})"), Error);
  CHECK_THROWS_AS(cli::config_from_json(R"({"cells": "many"})"), Error);
  CHECK_THROWS_AS(cli::config_from_json("[1, 2]"), Error);
  CHECK_THROWS_AS(cli::config_from_json("{"), Error);
}

TEST_CASE("resolve fills command defaults") {
  cli::RunConfig c;
  c.command = "solve";
  const cli::RunConfig solve = cli::resolve(c);
  CHECK(solve.cells == 4096);
  REQUIRE(solve.length.has_value());
  CHECK(*solve.length >= 25.0);
  c.command = "classify";
  CHECK(cli::resolve(c).cells == 1024);
  c.cells = 4096;
  CHECK_THROWS_AS(cli::resolve(c), Error);
  c.command = "sweep";
  c.cells = 256;
  CHECK_THROWS_AS(cli::resolve(c), Error);
  c.amplitudes = {1.0};
  CHECK(cli::resolve(c).kernels == std::vector<std::string>{"exp:k=1"});
  c.command = "fly";
  CHECK_THROWS_AS(cli::resolve(c), Error);
  c.command = "simulate";
  c.init_from = "profile.csv";
  CHECK(cli::resolve(c).init == "profile");
}

TEST_CASE("log-spaced amplitudes") {
  const auto v = cli::log_space(0.1, 10.0, 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 0.1);
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == 10.0);
  CHECK_THROWS_AS(cli::log_space(0.0, 1.0, 3), Error);
}

TEST_CASE("solve writes profile, trace and metadata") {
  const fs::path dir = fresh_dir("solve");
  const Result r = invoke({"solve", "--kernel", "exp:k=1", "--u-minus", "1", "--u-plus", "-1",
                           "--cells", "1024", "--out", dir.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.empty());
  const std::string profile = slurp(dir / "profile.csv");
  CHECK(profile.rfind("x,U\n", 0) == 0);
  CHECK(std::count(profile.begin(), profile.end(), '\n') == 1 + 2 * 1024 + 1);
  CHECK(slurp(dir / "trace.csv").rfind("n,sup_diff,u_origin,monotonicity_violations,ordering_violations\n", 0) == 0);
  const json meta = json::parse(slurp(dir / "profile.meta.json"));
  CHECK(meta["converged"] == true);
  CHECK(meta["s"] == 0.0);
  CHECK(meta["u_c"] == 1.0);
  CHECK(meta["config"]["cells"] == 1024);
  CHECK(meta["config"]["kernel"] == "exp:k=1");
  CHECK(meta["residuals"]["pointwise"].get<double>() <= 1e-3);
  CHECK_FALSE(meta["config"].contains("out_dir"));
}

TEST_CASE("config file and flags give identical bytes") {
  const fs::path a = fresh_dir("bytes_flags");
  const fs::path b = fresh_dir("bytes_config");
  CHECK(invoke({"solve", "--kernel", "tri:a=1", "--u-minus", "2", "--u-plus", "0.5", "--cells", "512",
                "--out", a.string()})
            .code == 0);
  const fs::path config = b / "run.json";
  std::ofstream(config) << R"({"kernel": "tri:a=1", "u_minus": 2, "u_plus": 0.5, "cells": 512})";
  CHECK(invoke({"--config", config.string(), "solve", "--out", b.string()}).code == 0);
  for (const char* name : {"profile.csv", "trace.csv", "profile.meta.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("flags override the config file") {
  const fs::path dir = fresh_dir("override");
  const fs::path config = dir / "run.json";
  std::ofstream(config) << R"({"kernel": "exp:k=1", "u_minus": 1, "u_plus": -1, "cells": 4000})";
  CHECK(invoke({"--config", config.string(), "solve", "--cells", "256", "--u-plus", "-2", "--out",
                dir.string()})
            .code == 0);
  const json meta = json::parse(slurp(dir / "profile.meta.json"));
  CHECK(meta["config"]["cells"] == 256);
  CHECK(meta["u_plus"] == -2.0);
  CHECK(meta["u_minus"] == 1.0);
}

TEST_CASE("errors exit 1 with a JSON report") {
  const fs::path dir = fresh_dir("errors");
  Result r = invoke({"solve", "--kernel", "exp:k=1", "--u-minus", "1", "--u-plus", "1", "--out", dir.string()});
  CHECK(r.code == cli::kExitError);
  check_error_json(r.err, "invalid_argument");
  CHECK(json::parse(r.err)["error"]["message"] == "u_minus must exceed u_plus");
  r = invoke({"solve", "--kernel", "cauchy:gamma=1", "--out", dir.string()});
  CHECK(r.code == cli::kExitError);
  check_error_json(r.err, "invalid_argument");
  r = invoke({"solve", "--bogus"});
  CHECK(r.code == cli::kExitError);
  check_error_json(r.err, "invalid_argument");
  r = invoke({"--config", (dir / "missing.json").string(), "solve"});
  CHECK(r.code == cli::kExitError);
  check_error_json(r.err, "io");
  r = invoke({"solve", "--kernel", "exp:k=1", "--length", "5", "--cells", "256", "--out", dir.string()});
  CHECK(r.code == cli::kExitError);
  check_error_json(r.err, "precondition");
  r = invoke({});
  CHECK(r.code == cli::kExitError);
}

TEST_CASE("non-convergence exits 2") {
  const fs::path dir = fresh_dir("indeterminate");
  const Result r = invoke({"solve", "--max-iter", "2", "--cells", "256", "--out", dir.string()});
  CHECK(r.code == cli::kExitIndeterminate);
  CHECK(json::parse(slurp(dir / "profile.meta.json"))["converged"] == false);
  const Result c = invoke({"classify", "--max-iter", "2", "--cells", "128", "--out", dir.string()});
  CHECK(c.code == cli::kExitIndeterminate);
  CHECK(json::parse(slurp(dir / "classification.json"))["measured"] == "indeterminate");
}

TEST_CASE("classify reports the refinement test") {
  const fs::path dir = fresh_dir("classify");
  const Result r = invoke({"classify", "--kernel", "exp:k=1", "--u-minus", "2.5", "--u-plus", "0",
                           "--cells", "512", "--out", dir.string()});
  CHECK(r.code == cli::kExitOk);
  const json j = json::parse(slurp(dir / "classification.json"));
  CHECK(j["measured"] == "discontinuous");
  CHECK(j["predicted_by_theorem"] == false);
  CHECK(j["threshold"] == doctest::Approx(4.0));
  CHECK(j["amplitude"] == 2.5);
  CHECK(j["cells"] == json::array({512, 1024, 2048}));
  CHECK(j["jumps"].size() == 3);
  CHECK(j["ratios"].size() == 2);
  CHECK(j["consistent"] == true);

  const fs::path tagged = fresh_dir("solve_classify");
  CHECK(invoke({"solve", "--classify", "--u-minus", "0.5", "--u-plus", "-0.5", "--cells", "2048",
                "--out", tagged.string()})
            .code == 0);
  CHECK(json::parse(slurp(tagged / "profile.meta.json"))["classification"] == "continuous");
}

TEST_CASE("sweep rows are ordered and deterministic") {
  const fs::path a = fresh_dir("sweep_serial");
  const fs::path b = fresh_dir("sweep_parallel");
  const std::vector<std::string> common = {"sweep", "--kernels", "exp:k=1", "tri:a=1",
                                           "--amplitudes", "5", "1", "--cells", "128"};
  auto serial = common;
  serial.insert(serial.end(), {"--jobs", "1", "--out", a.string()});
  auto parallel = common;
  parallel.insert(parallel.end(), {"--jobs", "4", "--out", b.string()});
  CHECK(invoke(serial).code == 0);
  CHECK(invoke(parallel).code == 0);
  const std::string text = slurp(a / "sweep.csv");
  CHECK(text == slurp(b / "sweep.csv"));
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].rfind("kernel,amplitude,", 0) == 0);
  CHECK(rows[1].rfind("exp:k=1,5,", 0) == 0);
  CHECK(rows[2].rfind("exp:k=1,1,", 0) == 0);
  CHECK(rows[3].rfind("tri:a=1,5,", 0) == 0);
  CHECK(rows[4].rfind("tri:a=1,1,", 0) == 0);
  CHECK(rows[1].find(",discontinuous,") != std::string::npos);

  const Result empty = invoke({"sweep", "--out", a.string()});
  CHECK(empty.code == cli::kExitError);
  check_error_json(empty.err, "invalid_argument");
}

TEST_CASE("amplitude range") {
  const fs::path dir = fresh_dir("range");
  CHECK(invoke({"sweep", "--amplitude-range", "1", "4", "3", "--cells", "64", "--center", "1",
                "--out", dir.string()})
            .code == 0);
  const std::string text = slurp(dir / "sweep.csv");
  CHECK(text.find("exp:k=1,1,1.5,0.5,") != std::string::npos);
  CHECK(text.find("exp:k=1,2,2,0,") != std::string::npos);
  CHECK(text.find("exp:k=1,4,3,-1,") != std::string::npos);
  CHECK(invoke({"sweep", "--amplitude-range", "1", "4", "2.5", "--out", dir.string()}).code == 1);
}

TEST_CASE("simulate") {
  const fs::path dir = fresh_dir("simulate");
  Result r = invoke({"simulate", "--init", "constant", "--u-minus", "0.5", "--u-plus", "0.5",
                     "--sim-cells", "400", "--t-end", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  const json diag = json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag["steps"].get<int>() > 0);
  CHECK(slurp(dir / "snapshots.csv").rfind("t,x,u\n", 0) == 0);

  r = invoke({"simulate", "--init", "constant", "--u-minus", "1", "--u-plus", "0", "--out", dir.string()});
  CHECK(r.code == 1);
  r = invoke({"simulate", "--init", "tanh:x", "--out", dir.string()});
  CHECK(r.code == 1);

  const fs::path wave = fresh_dir("simulate_profile");
  CHECK(invoke({"solve", "--u-minus", "2.5", "--u-plus", "0", "--cells", "1024", "--out",
                wave.string()})
            .code == 0);
  r = invoke({"simulate", "--init-from", (wave / "profile.csv").string(), "--a", "-20", "--b", "20",
              "--out", dir.string()});
  CHECK(r.code == 1);
  check_error_json(r.err, "invalid_argument");
  r = invoke({"simulate", "--init-from", (wave / "profile.csv").string(), "--a", "-80", "--b", "80",
              "--sim-cells", "1600", "--t-end", "3", "--out", dir.string()});
  CHECK(r.code == 0);
  const json fed = json::parse(slurp(dir / "diagnostics.json"));
  CHECK(fed["expected_speed"] == 1.25);
  CHECK(fed["measured_speed"].get<double>() == doctest::Approx(1.25).epsilon(0.02));
}

TEST_CASE("kernel-validate") {
  const fs::path dir = fresh_dir("validate");
  Result r = invoke({"kernel-validate", "--kernel", "uniform:a=1", "--out", dir.string()});
  CHECK(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report == json::parse(slurp(dir / "kernel_report.json")));
  CHECK(report["all_passed"] == true);
  bool saw_w11 = false;
  for (const auto& check : report["checks"]) {
    if (check["name"] == "w11_continuity") {
      saw_w11 = true;
      CHECK(check["passed"] == false);
      CHECK(check["advisory"] == true);
    }
  }
  CHECK(saw_w11);

  const fs::path table = dir / "bad.csv";
  {
    std::ofstream file(table);
    file << "y,K\n";
    for (int j = -40; j <= 40; ++j) {
      const double y = j / 20.0;
      double v = std::max(0.0, 1.0 - std::abs(y));
      if (j == -38 || j == 38) v = -1e-3;
      file << y << ',' << v << '\n';
    }
  }
  r = invoke({"kernel-validate", "--kernel", "table:" + table.string(), "--out", dir.string()});
  CHECK(r.code == cli::kExitIndeterminate);
  const json bad = json::parse(r.out);
  CHECK(bad["all_passed"] == false);
  for (const auto& check : bad["checks"]) {
    if (check["name"] == "nonnegativity") {
      CHECK(check["passed"] == false);
      CHECK(check["worst_violation"].get<double>() == doctest::Approx(1e-3));
    }
  }
}

TEST_CASE("the installed tool reports exit codes") {
  const fs::path dir = fresh_dir("tool");
  const std::string base = std::string("\"") + NLB_TOOL + "\" ";
  auto status = [&](const std::string& args) {
    const int raw = std::system((base + args + " > \"" + (dir / "out.txt").string() + "\" 2> \"" +
                                 (dir / "err.txt").string() + "\"")
                                    .c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("solve --cells 256 --out \"" + dir.string() + "\"") == 0);
  CHECK(status("solve --cells 256 --max-iter 1 --out \"" + dir.string() + "\"") == 2);
  CHECK(status("solve --u-minus 0 --u-plus 1 --out \"" + dir.string() + "\"") == 1);
  check_error_json(slurp(dir / "err.txt"), "invalid_argument");
  CHECK(status("--help") == 0);
}
