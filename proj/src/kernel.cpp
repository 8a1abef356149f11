#include "nlb/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "nlb/error.hpp"
#include "nlb/format.hpp"
#include "nlb/quadrature.hpp"

namespace nlb {

namespace {

constexpr double kTableTol = 1e-8;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + " must be positive and finite, got " +
                    format_double(value));
  }
}

}  // namespace

struct Kernel::Table {
  std::vector<double> y;
  std::vector<double> v;
  std::vector<double> cum;  // Phi at the nodes
  double spacing = 0.0;
  std::string label;

  double interp(double x) const {
    if (x < y.front() || x > y.back()) return 0.0;
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    auto j = static_cast<std::ptrdiff_t>(std::floor((x - y.front()) / spacing));
    j = std::clamp<std::ptrdiff_t>(j, 0, n - 2);
    const double t = (x - y[j]) / spacing;
    return v[j] + t * (v[j + 1] - v[j]);
  }

  double cdf(double x) const {
    if (x <= y.front()) return 0.0;
    if (x >= y.back()) return cum.back();
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    auto j = static_cast<std::ptrdiff_t>(std::floor((x - y.front()) / spacing));
    j = std::clamp<std::ptrdiff_t>(j, 0, n - 2);
    return cum[j] + 0.5 * (x - y[j]) * (v[j] + interp(x));
  }

  // Exact integral of |y|^p times the interpolant (3-point Gauss-Legendre is
  // exact for the cubic pieces; cells containing 0 are split).
  double moment(int p) const {
    static constexpr double gx[3] = {-0.7745966692414833770358531, 0.0,
                                     0.7745966692414833770358531};
    static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    auto piece = [&](double a, double b) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double x = mid + half * gx[k];
        s += gw[k] * std::pow(std::abs(x), p) * interp(x);
      }
      return s * half;
    };
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
      if (y[j] < 0.0 && y[j + 1] > 0.0) {
        total += piece(y[j], 0.0) + piece(0.0, y[j + 1]);
      } else {
        total += piece(y[j], y[j + 1]);
      }
    }
    return total;
  }

  // Local power-law decay exponent of the density between half and 9/10 of
  // the table radius; large when the tail is already negligible or flat.
  bool tail_too_heavy() const {
    const double radius = y.back();
    const double k0 = interp(0.0);
    const double edge = std::max(interp(radius), interp(-radius));
    if (!(k0 > 0.0) || edge <= 1e-10 * k0) return false;
    const double k_half = interp(0.5 * radius);
    const double k_outer = interp(0.9 * radius);
    if (!(k_outer > 0.0) || !(k_half > k_outer)) return false;
    const double exponent = std::log(k_half / k_outer) / std::log(1.8);
    return exponent < 3.0;
  }
};

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::exponential: return "exp";
    case KernelFamily::gaussian: return "gauss";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::triangular: return "tri";
    case KernelFamily::tabulated: return "table";
  }
  return "unknown";
}

Kernel::Kernel(KernelFamily family, double param) : family_(family), param_(param) {}

Kernel Kernel::exponential(double rate) {
  require_positive(rate, "exponential rate k");
  Kernel kernel(KernelFamily::exponential, rate);
  kernel.finish();
  return kernel;
}

Kernel Kernel::gaussian(double sigma) {
  require_positive(sigma, "gaussian scale sigma");
  Kernel kernel(KernelFamily::gaussian, sigma);
  kernel.finish();
  return kernel;
}

Kernel Kernel::uniform(double half_width) {
  require_positive(half_width, "uniform half-width a");
  Kernel kernel(KernelFamily::uniform, half_width);
  kernel.finish();
  return kernel;
}

Kernel Kernel::triangular(double half_width) {
  require_positive(half_width, "triangular half-width a");
  Kernel kernel(KernelFamily::triangular, half_width);
  kernel.finish();
  return kernel;
}

Kernel Kernel::tabulated(std::vector<double> y, std::vector<double> values,
                         TableOptions options) {
  if (y.size() != values.size()) {
    throw Error(ErrorKind::invalid_argument, "kernel table: column lengths differ");
  }
  if (y.size() < 3) {
    throw Error(ErrorKind::invalid_argument, "kernel table needs at least 3 samples");
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!std::isfinite(y[j]) || !std::isfinite(values[j])) {
      throw Error(ErrorKind::invalid_argument, "kernel table contains non-finite entries");
    }
  }
  const double spacing = (y.back() - y.front()) / static_cast<double>(y.size() - 1);
  if (!(spacing > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "kernel table abscissae must be strictly increasing");
  }
  for (std::size_t j = 0; j + 1 < y.size(); ++j) {
    const double step = y[j + 1] - y[j];
    if (!(step > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "kernel table abscissae must be strictly increasing");
    }
    if (std::abs(step - spacing) > 1e-9 * spacing + 1e-12 * std::abs(y[j])) {
      throw Error(ErrorKind::invalid_argument, "kernel table abscissae must be uniformly spaced");
    }
  }

  auto table = std::make_shared<Table>();
  table->y = std::move(y);
  table->v = std::move(values);
  table->spacing = spacing;
  table->label = "inline(n=" + std::to_string(table->y.size()) + ")";

  const std::size_t n = table->y.size();
  auto accumulate = [&] {
    table->cum.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      table->cum[j] = table->cum[j - 1] +
                      0.5 * (table->y[j] - table->y[j - 1]) * (table->v[j] + table->v[j - 1]);
    }
  };
  accumulate();

  if (options.strict) {
    const double scale = std::max(std::abs(table->y.front()), std::abs(table->y.back()));
    if (std::abs(table->y.front() + table->y.back()) > 1e-9 * scale) {
      throw Error(ErrorKind::invalid_argument, "kernel table abscissa is not symmetric about 0");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (table->v[j] < -kTableTol) {
        throw Error(ErrorKind::invalid_argument,
                    "kernel table has a negative entry " + format_double(table->v[j]) +
                        " at y=" + format_double(table->y[j]));
      }
      if (std::abs(table->v[j] - table->v[n - 1 - j]) > kTableTol) {
        throw Error(ErrorKind::invalid_argument,
                    "kernel table is not even at y=" + format_double(table->y[j]));
      }
    }
    const double mass = table->cum.back();
    if (std::abs(mass - 1.0) > kTableTol) {
      if (!options.renormalize) {
        throw Error(ErrorKind::invalid_argument,
                    "kernel table mass is " + format_double(mass) +
                        ", not 1 (use the renorm flag to rescale)");
      }
      if (!(mass > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "kernel table has no positive mass");
      }
      for (double& value : table->v) value /= mass;
      accumulate();
    }
    if (table->tail_too_heavy()) {
      throw Error(ErrorKind::invalid_argument,
                  "kernel table tail decays too slowly: second moment does not converge");
    }
  } else if (options.renormalize && table->cum.back() > 0.0) {
    const double mass = table->cum.back();
    for (double& value : table->v) value /= mass;
    accumulate();
  }

  Kernel kernel(KernelFamily::tabulated, 0.0);
  kernel.table_ = std::move(table);
  kernel.finish();
  return kernel;
}

void Kernel::finish() {
  const double p = param_;
  switch (family_) {
    case KernelFamily::exponential:
      moments_ = {1.0 / p, 2.0 / (p * p)};
      breaks_ = {0.0};
      break;
    case KernelFamily::gaussian:
      moments_ = {p * std::sqrt(2.0 / std::numbers::pi), p * p};
      breaks_ = {};
      break;
    case KernelFamily::uniform:
      moments_ = {0.5 * p, p * p / 3.0};
      breaks_ = {-p, p};
      break;
    case KernelFamily::triangular:
      moments_ = {p / 3.0, p * p / 6.0};
      breaks_ = {-p, 0.0, p};
      break;
    case KernelFamily::tabulated:
      moments_ = {table_->moment(1), table_->moment(2)};
      breaks_ = table_->y;
      if (std::find(breaks_.begin(), breaks_.end(), 0.0) == breaks_.end()) {
        breaks_.insert(std::upper_bound(breaks_.begin(), breaks_.end(), 0.0), 0.0);
      }
      break;
  }
}

double Kernel::density(double y) const {
  const double p = param_;
  switch (family_) {
    case KernelFamily::exponential:
      return 0.5 * p * std::exp(-p * std::abs(y));
    case KernelFamily::gaussian: {
      const double t = y / p;
      return std::exp(-0.5 * t * t) / (p * std::sqrt(2.0 * std::numbers::pi));
    }
    case KernelFamily::uniform:
      return std::abs(y) <= p ? 0.5 / p : 0.0;
    case KernelFamily::triangular: {
      const double r = p - std::abs(y);
      return r > 0.0 ? r / (p * p) : 0.0;
    }
    case KernelFamily::tabulated:
      return table_->interp(y);
  }
  return 0.0;
}

double Kernel::cdf(double x) const {
  const double p = param_;
  switch (family_) {
    case KernelFamily::exponential:
      return x < 0.0 ? 0.5 * std::exp(p * x) : 1.0 - 0.5 * std::exp(-p * x);
    case KernelFamily::gaussian: {
      const double t = x / (p * std::numbers::sqrt2);
      return x < 0.0 ? 0.5 * std::erfc(-t) : 1.0 - 0.5 * std::erfc(t);
    }
    case KernelFamily::uniform:
      return std::clamp((x + p) / (2.0 * p), 0.0, 1.0);
    case KernelFamily::triangular: {
      if (x <= -p) return 0.0;
      if (x >= p) return 1.0;
      if (x <= 0.0) {
        const double r = x + p;
        return r * r / (2.0 * p * p);
      }
      const double r = p - x;
      return 1.0 - r * r / (2.0 * p * p);
    }
    case KernelFamily::tabulated:
      return table_->cdf(x);
  }
  return 0.0;
}

double Kernel::tail_radius(double mass) const {
  if (mass >= 0.5) return 0.0;
  const double p = param_;
  switch (family_) {
    case KernelFamily::exponential:
      return mass > 0.0 ? std::log(0.5 / mass) / p
                        : std::numeric_limits<double>::infinity();
    case KernelFamily::gaussian:
      return mass > 0.0 ? p * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * mass)
                        : std::numeric_limits<double>::infinity();
    case KernelFamily::uniform:
      return p * (1.0 - 2.0 * std::max(mass, 0.0));
    case KernelFamily::triangular:
      return p * (1.0 - std::sqrt(2.0 * std::max(mass, 0.0)));
    case KernelFamily::tabulated: {
      double lo = 0.0;
      double hi = std::max(std::abs(table_->y.front()), table_->y.back());
      if (cdf(-hi) > mass) return hi;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(-mid) <= mass ? hi : lo) = mid;
      }
      return hi;
    }
  }
  return 0.0;
}

std::optional<double> Kernel::support_radius() const {
  switch (family_) {
    case KernelFamily::uniform:
    case KernelFamily::triangular:
      return param_;
    case KernelFamily::tabulated:
      return std::max(std::abs(table_->y.front()), table_->y.back());
    default:
      return std::nullopt;
  }
}

std::string Kernel::spec() const {
  switch (family_) {
    case KernelFamily::exponential: return "exp:k=" + format_double(param_);
    case KernelFamily::gaussian: return "gauss:sigma=" + format_double(param_);
    case KernelFamily::uniform: return "uniform:a=" + format_double(param_);
    case KernelFamily::triangular: return "tri:a=" + format_double(param_);
    case KernelFamily::tabulated: return "table:" + table_->label;
  }
  return "unknown";
}

const std::vector<double>& Kernel::table_abscissae() const {
  static const std::vector<double> empty;
  return table_ ? table_->y : empty;
}

const std::vector<double>& Kernel::table_values() const {
  static const std::vector<double> empty;
  return table_ ? table_->v : empty;
}

double kernel_cdf(const Kernel& kernel, double x) { return kernel.cdf(x); }

KernelMoments kernel_moments(const Kernel& kernel) { return kernel.moments(); }

namespace {

double parse_number(std::string_view text, std::string_view spec) {
  std::string s(text);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorKind::invalid_argument,
                "malformed number '" + s + "' in kernel spec '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

Kernel read_kernel_table(const std::string& path, TableOptions options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open kernel table '" + path + "'");
  std::string line;
  std::vector<double> y, v;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::invalid_argument, "kernel table row without comma: '" + line + "'");
    }
    y.push_back(parse_number(std::string_view(line).substr(0, comma), path));
    v.push_back(parse_number(std::string_view(line).substr(comma + 1), path));
  }
  Kernel kernel = Kernel::tabulated(std::move(y), std::move(v), options);
  // Re-label so the spec string round-trips through build_kernel.
  auto table = std::make_shared<Kernel::Table>(*kernel.table_);
  table->label = path + (options.renormalize ? ":renorm" : "");
  kernel.table_ = std::move(table);
  return kernel;
}

Kernel build_kernel(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::invalid_argument,
                "kernel spec '" + std::string(spec) + "' must look like family:param=value");
  }
  const std::string_view family = spec.substr(0, colon);
  std::string_view rest = spec.substr(colon + 1);

  if (family == "table") {
    TableOptions options;
    constexpr std::string_view kRenorm = ":renorm";
    if (rest.size() > kRenorm.size() && rest.substr(rest.size() - kRenorm.size()) == kRenorm) {
      options.renormalize = true;
      rest.remove_suffix(kRenorm.size());
    }
    return read_kernel_table(std::string(rest), options);
  }

  const auto eq = rest.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorKind::invalid_argument,
                "kernel spec '" + std::string(spec) + "' is missing '=value'");
  }
  const std::string_view key = rest.substr(0, eq);
  const double value = parse_number(rest.substr(eq + 1), spec);

  auto expect_key = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys)
      if (key == k) return;
    throw Error(ErrorKind::invalid_argument,
                "unknown parameter '" + std::string(key) + "' for kernel family '" +
                    std::string(family) + "'");
  };

  if (family == "exp" || family == "exponential") {
    expect_key({"k", "rate"});
    return Kernel::exponential(value);
  }
  if (family == "gauss" || family == "gaussian") {
    expect_key({"sigma", "s"});
    return Kernel::gaussian(value);
  }
  if (family == "uniform") {
    expect_key({"a"});
    return Kernel::uniform(value);
  }
  if (family == "tri" || family == "triangular") {
    expect_key({"a"});
    return Kernel::triangular(value);
  }
  throw Error(ErrorKind::invalid_argument, "unknown kernel family '" + std::string(family) + "'");
}

bool KernelReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const KernelCheck& c) { return c.passed || c.advisory; });
}

const KernelCheck* KernelReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

KernelReport validate_kernel(const Kernel& kernel, int probe_count) {
  if (probe_count < 16) {
    throw Error(ErrorKind::invalid_argument, "validate_kernel needs at least 16 probes");
  }
  KernelReport report;
  report.kernel = kernel.spec();

  const double radius = kernel.support_radius().value_or(kernel.tail_radius(1e-14));

  std::vector<double> probes;
  probes.reserve(static_cast<std::size_t>(probe_count) + kernel.table_abscissae().size());
  for (int p = 0; p < probe_count; ++p) {
    probes.push_back(radius * static_cast<double>(p) / (probe_count - 1));
  }
  for (double y : kernel.table_abscissae()) probes.push_back(std::abs(y));
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  KernelCheck even;
  even.name = "evenness";
  KernelCheck nonneg;
  nonneg.name = "nonnegativity";
  KernelCheck decay;
  decay.name = "monotone_decay";
  double variation = 0.0;
  double previous = kernel.density(probes.front());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const double y = probes[p];
    const double right = kernel.density(y);
    const double left = kernel.density(-y);
    even.worst_violation = std::max(even.worst_violation, std::abs(right - left));
    nonneg.worst_violation = std::max({nonneg.worst_violation, -right, -left});
    if (p > 0) {
      if (probes[p - 1] > 0.0) {
        decay.worst_violation = std::max(decay.worst_violation, right - previous);
      }
      variation += 2.0 * std::abs(right - previous);
    }
    previous = right;
  }
  for (double y : kernel.table_abscissae()) {
    nonneg.worst_violation = std::max(nonneg.worst_violation, -kernel.density(y));
  }
  even.passed = even.worst_violation <= 1e-12;
  nonneg.passed = nonneg.worst_violation <= 0.0;
  decay.passed = decay.worst_violation <= 1e-12;
  report.checks.push_back(even);
  report.checks.push_back(nonneg);

  KernelCheck mass;
  mass.name = "unit_mass";
  mass.worst_violation = std::max(std::abs(kernel.cdf(-1e300)),
                                  std::abs(kernel.cdf(1e300) - 1.0));
  {
    const double lo = -radius, hi = radius;
    double integral = 0.0;
    try {
      integral = quad::adaptive([&](double y) { return kernel.density(y); }, lo, hi,
                                kernel.breakpoints(), 1e-13, 1e-15);
    } catch (const Error&) {
      integral = std::numeric_limits<double>::quiet_NaN();
    }
    const double total = integral + kernel.cdf(lo) + (1.0 - kernel.cdf(hi));
    const double defect = std::isfinite(total) ? std::abs(total - 1.0) : 1.0;
    mass.worst_violation = std::max(mass.worst_violation, defect);
    if (defect > 1e-12) mass.note = "quadrature mass defect " + format_double(defect);
  }
  mass.passed = mass.worst_violation <= 1e-10;
  report.checks.push_back(mass);
  report.checks.push_back(decay);

  KernelCheck m2;
  m2.name = "finite_second_moment";
  const KernelMoments moments = kernel.moments();
  m2.passed = std::isfinite(moments.m2) && moments.m2 > 0.0;
  if (kernel.family() == KernelFamily::tabulated) {
    std::vector<double> y = kernel.table_abscissae();
    const double r = y.back();
    const double k0 = kernel.density(0.0);
    const double edge = std::max(kernel.density(r), kernel.density(-r));
    const double kh = kernel.density(0.5 * r), ko = kernel.density(0.9 * r);
    if (k0 > 0.0 && edge > 1e-10 * k0 && ko > 0.0 && kh > ko &&
        std::log(kh / ko) / std::log(1.8) < 3.0) {
      m2.passed = false;
      m2.note = "tail decays slower than |y|^-3";
    }
  }
  m2.worst_violation = m2.passed ? 0.0 : 1.0;
  report.checks.push_back(m2);

  KernelCheck bv;
  bv.name = "bounded_variation";
  bv.passed = std::isfinite(variation);
  bv.worst_violation = bv.passed ? 0.0 : std::numeric_limits<double>::infinity();
  bv.note = "total variation on probe grid " + format_double(variation);
  report.checks.push_back(bv);

  // W^{1,1} needs an absolutely continuous density; a jump only gives BV.
  KernelCheck w11;
  w11.name = "w11_continuity";
  w11.advisory = true;
  const double k0 = std::max(kernel.density(0.0), 1e-300);
  for (double b : kernel.breakpoints()) {
    const double eta = 1e-9 * std::max(1.0, std::abs(b));
    w11.worst_violation = std::max(w11.worst_violation,
                                   std::abs(kernel.density(b - eta) - kernel.density(b + eta)));
  }
  w11.passed = w11.worst_violation <= 1e-6 * k0;
  if (!w11.passed) w11.note = "density has jumps: bounded variation only, not W^{1,1}";
  report.checks.push_back(w11);

  return report;
}

}  // namespace nlb
