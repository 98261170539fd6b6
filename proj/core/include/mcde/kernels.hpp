#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace mcde {

enum class KernelFamily { gaussian, exponential, uniform, triangular, epanechnikov, cosine };

//! Analytic constants of the 1-D kernel.
struct KernelConstants {
  double k0 = 0.0;        // K(0)
  double sigma2_k = 0.0;  // integral of u^2 K(u)
  double r_k = 0.0;       // integral of K(u)^2
  std::optional<double> alpha;  // compact families only
  std::optional<double> beta;   // compact families only
  double gamma = 0.0;     // |K''(0)| / K(0)
};

class Kernel {
public:
  constexpr Kernel() = default;
  constexpr explicit Kernel(KernelFamily family) : family_(family) {}

  constexpr KernelFamily family() const noexcept { return family_; }
  bool compact() const noexcept;
  //! 1 for compact families, +inf otherwise.
  double support_radius() const noexcept;

  //! Radial kernel in `dim` dimensions evaluated at scaled distance u = d/h,
  //! normalized so that its integral over R^dim is 1. Equals kernel_eval for dim = 1.
  double eval(double u, std::size_t dim = 1) const;

  //! Same as eval() but takes u^2; avoids a sqrt for the Gaussian.
  double eval_squared(double u2, std::size_t dim = 1) const;

  //! K(0) of the dim-dimensional radial kernel.
  double at_zero(std::size_t dim = 1) const { return eval(0.0, dim); }

  //! Unnormalized radial profile with profile(0) = 1; eval(u, dim) = c_dim * profile(u).
  double profile(double u) const;
  double profile_squared(double u2) const;

  //! A radius r beyond which K(u) <= fraction * K(0) for all |u| > r; the support
  //! radius for compact families.
  double tail_radius(double fraction) const;

  bool operator==(const Kernel&) const = default;

private:
  KernelFamily family_ = KernelFamily::gaussian;
};

//! 1-D kernel value K(u); 0 outside the support.
double kernel_eval(const Kernel& kernel, double u);

//! Hand-coded K''(u) of the 1-D kernel. At the kinks of the exponential and
//! triangular kernels this returns the one-sided limit.
double kernel_second_derivative(const Kernel& kernel, double u);

KernelConstants kernel_constants(const Kernel& kernel);

//! Normalization factor c_D such that c_D * profile(|x|) integrates to 1 over R^dim,
//! where profile is the 1-D kernel with its 1-D constant stripped (profile(0) = 1).
double radial_normalization(KernelFamily family, std::size_t dim);

std::string_view to_string(KernelFamily family);
//! Parses a lowercase family name ("gaussian", "epanechnikov", ...).
KernelFamily parse_kernel_family(std::string_view name);

} // namespace mcde
