#include "nlb/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlb/error.hpp"
#include "nlb/format.hpp"

namespace nlb::io {

namespace {

double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::invalid_argument, "malformed number '" + std::string(text) + "' in " + where);
  }
  return value;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  file << text;
  if (!file) throw Error(ErrorKind::io, "failed writing " + path);
}

void write_profile_csv(const std::string& path, const WaveProfile& profile) {
  const std::vector<double> x = profile.full_line_x();
  const std::vector<double> U = profile.full_line_u();
  std::string text = "x,U\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    text += format_double(x[i]) + ',' + format_double(U[i]) + '\n';
  }
  write_text(path, text);
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  std::string text = "n,sup_diff,u_origin,monotonicity_violations,ordering_violations\n";
  for (const IterationRecord& r : trace.records) {
    text += std::to_string(r.n) + ',' + format_double(r.sup_diff) + ',' +
            format_double(r.u_origin) + ',' + std::to_string(r.monotonicity_violations) + ',' +
            std::to_string(r.ordering_violations) + '\n';
  }
  write_text(path, text);
}

void write_snapshots_csv(const std::string& path, const Trajectory& trajectory) {
  std::string text = "t,x,u\n";
  for (const Snapshot& snap : trajectory.snapshots) {
    const std::string t = format_double(snap.t);
    for (std::size_t j = 0; j < snap.u.size(); ++j) {
      text += t + ',' + format_double(trajectory.x[j]) + ',' + format_double(snap.u[j]) + '\n';
    }
  }
  write_text(path, text);
}

double SampledProfile::operator()(double xq) const {
  if (xq <= x.front()) return U.front();
  if (xq >= x.back()) return U.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const auto j = static_cast<std::size_t>(it - x.begin()) - 1;
  const double t = (xq - x[j]) / (x[j + 1] - x[j]);
  return U[j] + t * (U[j + 1] - U[j]);
}

SampledProfile read_profile_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorKind::io, "cannot open profile " + path);
  std::string line;
  if (!std::getline(file, line)) throw Error(ErrorKind::invalid_argument, path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,U") {
    throw Error(ErrorKind::invalid_argument, path + ": expected header 'x,U', got '" + line + "'");
  }
  SampledProfile profile;
  int row = 1;
  while (std::getline(file, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::invalid_argument, path + ": row " + std::to_string(row) + " has one column");
    }
    const std::string where = path + " row " + std::to_string(row);
    const double xv = parse_number(std::string_view(line).substr(0, comma), where);
    const double uv = parse_number(std::string_view(line).substr(comma + 1), where);
    if (!profile.x.empty() && !(xv > profile.x.back())) {
      throw Error(ErrorKind::invalid_argument, where + ": x is not increasing");
    }
    profile.x.push_back(xv);
    profile.U.push_back(uv);
  }
  if (profile.x.size() < 2) {
    throw Error(ErrorKind::invalid_argument, path + " needs at least two rows");
  }
  return profile;
}

}  // namespace nlb::io
