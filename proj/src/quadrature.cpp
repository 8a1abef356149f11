#include "nlb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlb/error.hpp"

namespace nlb::quad {

double adaptive(const Integrand& f, double a, double b,
                std::span<const double> breakpoints, double rel_tol,
                double abs_tol, unsigned max_depth) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double bp : breakpoints) {
    if (bp > a && bp < b) cuts.push_back(bp);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p];
    const double hi = cuts[p + 1];
    if (!(hi > lo)) continue;
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, lo, hi, max_depth, rel_tol, &error, &l1);
    if (!std::isfinite(value) || error > std::max(abs_tol, 10.0 * rel_tol * l1)) {
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << lo << ", " << hi
          << "] did not converge (error estimate " << error << ")";
      throw Error(ErrorKind::no_convergence, msg.str());
    }
    total += value;
  }
  return total;
}

}  // namespace nlb::quad
