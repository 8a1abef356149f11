#include "toeplitz_fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace nlb::detail {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

int next_fast_size(int m) {
  for (int candidate = std::max(m, 1);; ++candidate) {
    int r = candidate;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return candidate;
  }
}

ToeplitzBank::ToeplitzBank(int n, const std::vector<std::vector<double>>& symbols)
    : n_(n), period_(next_fast_size(2 * n + 1)) {
  const auto p = static_cast<std::size_t>(period_);
  const std::size_t bins = p / 2 + 1;
  std::vector<double> real(p);
  std::vector<std::complex<double>> spec(bins);
  {
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(period_, real.data(),
                                    reinterpret_cast<fftw_complex*>(spec.data()), kPlanFlags);
    backward_ = fftw_plan_dft_c2r_1d(period_, reinterpret_cast<fftw_complex*>(spec.data()),
                                     real.data(), kPlanFlags);
  }
  if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");

  for (const auto& t : symbols) {
    if (t.size() != static_cast<std::size_t>(2 * n + 1)) {
      throw std::invalid_argument("Toeplitz symbol must have 2n+1 entries");
    }
    std::fill(real.begin(), real.end(), 0.0);
    for (int m = 0; m <= n; ++m) real[static_cast<std::size_t>(m)] = t[static_cast<std::size_t>(m + n)];
    for (int m = 1; m <= n; ++m) real[p - static_cast<std::size_t>(m)] = t[static_cast<std::size_t>(n - m)];
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), real.data(),
                         reinterpret_cast<fftw_complex*>(spec.data()));
    spectra_.push_back(spec);
  }
}

ToeplitzBank::~ToeplitzBank() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

std::vector<double> ToeplitzBank::apply(std::span<const std::span<const double>> inputs) const {
  if (inputs.size() != spectra_.size()) {
    throw std::invalid_argument("ToeplitzBank: one input per operator required");
  }
  const auto p = static_cast<std::size_t>(period_);
  const std::size_t bins = p / 2 + 1;
  std::vector<double> real(p);
  std::vector<std::complex<double>> spec(bins), acc(bins);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto x = inputs[k];
    std::fill(real.begin(), real.end(), 0.0);
    std::copy(x.begin(), x.end(), real.begin());
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), real.data(),
                         reinterpret_cast<fftw_complex*>(spec.data()));
    const auto& s = spectra_[k];
    for (std::size_t b = 0; b < bins; ++b) acc[b] += spec[b] * s[b];
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), reinterpret_cast<fftw_complex*>(acc.data()),
                       real.data());
  const double scale = 1.0 / static_cast<double>(period_);
  std::vector<double> out(static_cast<std::size_t>(n_) + 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] * scale;
  return out;
}

}  // namespace nlb::detail
