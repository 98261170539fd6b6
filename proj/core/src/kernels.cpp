#include "mcde/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mcde/error.hpp"

namespace mcde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Surface area of the unit sphere S^{dim-1}.
double sphere_area(std::size_t dim) {
  const double d = static_cast<double>(dim);
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

// Integral of r^(dim-1) cos(pi r / 2) over [0, 1], by integration by parts.
double cosine_radial_moment(std::size_t dim) {
  const double a = kHalfPi;
  double c = std::sin(a) / a;          // n = 0
  double s = (1.0 - std::cos(a)) / a;  // n = 0
  for (std::size_t n = 1; n < dim; ++n) {
    const double nn = static_cast<double>(n);
    const double c_next = std::sin(a) / a - (nn / a) * s;
    const double s_next = -std::cos(a) / a + (nn / a) * c;
    c = c_next;
    s = s_next;
  }
  return c;
}

} // namespace

bool Kernel::compact() const noexcept {
  return family_ != KernelFamily::gaussian && family_ != KernelFamily::exponential;
}

double Kernel::support_radius() const noexcept {
  return compact() ? 1.0 : std::numeric_limits<double>::infinity();
}

double Kernel::profile(double u) const {
  const double a = std::abs(u);
  switch (family_) {
    case KernelFamily::gaussian: return std::exp(-0.5 * a * a);
    case KernelFamily::exponential: return std::exp(-a);
    case KernelFamily::uniform: return a <= 1.0 ? 1.0 : 0.0;
    case KernelFamily::triangular: return a <= 1.0 ? 1.0 - a : 0.0;
    case KernelFamily::epanechnikov: return a <= 1.0 ? 1.0 - a * a : 0.0;
    case KernelFamily::cosine: return a <= 1.0 ? std::cos(kHalfPi * a) : 0.0;
  }
  return 0.0;
}

double Kernel::profile_squared(double u2) const {
  switch (family_) {
    case KernelFamily::gaussian: return std::exp(-0.5 * u2);
    case KernelFamily::uniform: return u2 <= 1.0 ? 1.0 : 0.0;
    case KernelFamily::epanechnikov: return u2 <= 1.0 ? 1.0 - u2 : 0.0;
    default: return profile(std::sqrt(u2));
  }
}

double Kernel::eval(double u, std::size_t dim) const {
  return radial_normalization(family_, dim) * profile(u);
}

double Kernel::eval_squared(double u2, std::size_t dim) const {
  return radial_normalization(family_, dim) * profile_squared(u2);
}

double Kernel::tail_radius(double fraction) const {
  if (compact()) return 1.0;
  if (!(fraction > 0.0) || fraction >= 1.0) {
    throw Error(ErrorCode::InvalidParams, "tail fraction must lie in (0, 1)");
  }
  if (family_ == KernelFamily::gaussian) return std::sqrt(-2.0 * std::log(fraction));
  return -std::log(fraction);
}

double kernel_eval(const Kernel& kernel, double u) { return kernel.eval(u, 1); }

double kernel_second_derivative(const Kernel& kernel, double u) {
  const double a = std::abs(u);
  switch (kernel.family()) {
    case KernelFamily::gaussian:
      return (u * u - 1.0) * std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
    case KernelFamily::exponential: return 0.5 * std::exp(-a);
    case KernelFamily::uniform: return 0.0;
    case KernelFamily::triangular: return 0.0;
    case KernelFamily::epanechnikov: return a <= 1.0 ? -1.5 : 0.0;
    case KernelFamily::cosine:
      return a <= 1.0 ? -(kPi / 4.0) * kHalfPi * kHalfPi * std::cos(kHalfPi * a) : 0.0;
  }
  return 0.0;
}

KernelConstants kernel_constants(const Kernel& kernel) {
  KernelConstants c;
  switch (kernel.family()) {
    case KernelFamily::gaussian:
      c.k0 = 1.0 / std::sqrt(2.0 * kPi);
      c.sigma2_k = 1.0;
      c.r_k = 1.0 / (2.0 * std::sqrt(kPi));
      c.gamma = 1.0;
      break;
    case KernelFamily::exponential:
      c.k0 = 0.5;
      c.sigma2_k = 2.0;
      c.r_k = 0.25;
      c.gamma = 1.0;
      break;
    case KernelFamily::uniform:
      c.k0 = 0.5;
      c.sigma2_k = 1.0 / 3.0;
      c.r_k = 0.5;
      c.alpha = 1.0;
      c.beta = 0.0;
      c.gamma = 0.0;
      break;
    case KernelFamily::triangular:
      c.k0 = 1.0;
      c.sigma2_k = 1.0 / 6.0;
      c.r_k = 2.0 / 3.0;
      c.alpha = 2.0;
      c.beta = 1.0;
      c.gamma = 0.0;
      break;
    case KernelFamily::epanechnikov:
      c.k0 = 0.75;
      c.sigma2_k = 0.2;
      c.r_k = 0.6;
      c.alpha = 2.0;
      c.beta = 1.0;
      c.gamma = 2.0;
      break;
    case KernelFamily::cosine:
      c.k0 = kPi / 4.0;
      c.sigma2_k = 1.0 - 8.0 / (kPi * kPi);
      c.r_k = kPi * kPi / 16.0;
      c.alpha = 2.0;
      c.beta = 1.0;
      c.gamma = kPi * kPi / 4.0;
      break;
  }
  return c;
}

double radial_normalization(KernelFamily family, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidParams, "dimension must be positive");
  if (dim == 1) {
    // Table values, exact.
    switch (family) {
      case KernelFamily::gaussian: return 1.0 / std::sqrt(2.0 * kPi);
      case KernelFamily::exponential: return 0.5;
      case KernelFamily::uniform: return 0.5;
      case KernelFamily::triangular: return 1.0;
      case KernelFamily::epanechnikov: return 0.75;
      case KernelFamily::cosine: return kPi / 4.0;
    }
  }
  const double d = static_cast<double>(dim);
  double mass = 0.0;
  switch (family) {
    case KernelFamily::gaussian: mass = std::pow(2.0 * kPi, d / 2.0); break;
    case KernelFamily::exponential: mass = sphere_area(dim) * std::tgamma(d); break;
    case KernelFamily::uniform: mass = sphere_area(dim) / d; break;
    case KernelFamily::triangular: mass = sphere_area(dim) / (d * (d + 1.0)); break;
    case KernelFamily::epanechnikov: mass = 2.0 * sphere_area(dim) / (d * (d + 2.0)); break;
    case KernelFamily::cosine: mass = sphere_area(dim) * cosine_radial_moment(dim); break;
  }
  return 1.0 / mass;
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::triangular: return "triangular";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::cosine: return "cosine";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (auto f : {KernelFamily::gaussian, KernelFamily::exponential, KernelFamily::uniform,
                 KernelFamily::triangular, KernelFamily::epanechnikov, KernelFamily::cosine}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::InvalidParams, "unknown kernel family '" + std::string(name) + "'");
}

} // namespace mcde
