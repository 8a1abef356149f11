// Sums of Toeplitz matrix-vector products evaluated by circulant embedding.

#ifndef NLB_TOEPLITZ_FFT_HPP_
#define NLB_TOEPLITZ_FFT_HPP_

#include <complex>
#include <span>
#include <vector>

namespace nlb::detail {

// Holds k Toeplitz operators T_k of order n+1, (T_k x)_i = sum_j x_j t_k(i-j)
// for i, j in [0, n], with symbols t_k given on [-n, n] (t_k[m + n]).
// apply() returns sum_k T_k x_k with a single inverse transform.
class ToeplitzBank {
 public:
  ToeplitzBank(int n, const std::vector<std::vector<double>>& symbols);
  ~ToeplitzBank();
  ToeplitzBank(const ToeplitzBank&) = delete;
  ToeplitzBank& operator=(const ToeplitzBank&) = delete;

  std::vector<double> apply(std::span<const std::span<const double>> inputs) const;
  std::size_t operators() const { return spectra_.size(); }

 private:
  int n_;
  int period_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
  std::vector<std::vector<std::complex<double>>> spectra_;
};

// Smallest 2,3,5,7-smooth integer >= m.
int next_fast_size(int m);

}  // namespace nlb::detail

#endif  // NLB_TOEPLITZ_FFT_HPP_
