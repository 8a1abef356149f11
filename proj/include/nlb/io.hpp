// Plain-text outputs: CSV with a header row, '.' decimals and '\n' line
// endings. Numbers use the shortest round-trip representation so identical
// runs produce identical bytes.

#ifndef NLB_IO_HPP_
#define NLB_IO_HPP_

#include <string>
#include <vector>

#include "nlb/cauchy.hpp"
#include "nlb/waves.hpp"

namespace nlb::io {

// "x,U" on the 2N+1 full-line nodes.
void write_profile_csv(const std::string& path, const WaveProfile& profile);
// "n,sup_diff,u_origin,monotonicity_violations,ordering_violations"
void write_trace_csv(const std::string& path, const IterationTrace& trace);
// "t,x,u", one row per cell per snapshot.
void write_snapshots_csv(const std::string& path, const Trajectory& trajectory);

// A profile read back from "x,U"; constant beyond the first and last rows.
struct SampledProfile {
  std::vector<double> x;
  std::vector<double> U;

  double u_left() const { return U.front(); }
  double u_right() const { return U.back(); }
  double speed() const { return 0.5 * (U.front() + U.back()); }
  double operator()(double xq) const;
};

// Throws Error(io) when unreadable and Error(invalid_argument) when the
// header or rows are malformed or x is not increasing.
SampledProfile read_profile_csv(const std::string& path);

// Writes text to path, creating parent directories. Throws Error(io).
void write_text(const std::string& path, const std::string& text);

}  // namespace nlb::io

#endif  // NLB_IO_HPP_
