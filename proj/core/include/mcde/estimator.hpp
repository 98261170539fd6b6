#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mcde/chain.hpp"
#include "mcde/kernels.hpp"
#include "mcde/preprocess.hpp"
#include "mcde/sample.hpp"

namespace mcde {

//! Axis-aligned box [lo_k, hi_k] per dimension.
struct DomainBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double volume() const;
  bool contains(std::span<const double> x) const;
  //! Each side pushed out by `margin`.
  DomainBox expanded(double margin) const;

  //! Bounding box of the sample; for D = 1 this is [x_(1), x_(N)].
  static DomainBox bounding(const Sample& sample);
};

//! Unnormalized estimate at the sample points: KDE(x_i) - b K(0) / (N h^D).
struct PointwiseEstimate {
  std::vector<double> values;  // clamped at 0
  std::vector<double> raw;     // before clamping
  std::size_t clamped = 0;     // number of negative raw values set to 0
  double h = 0.0;
  double b = 0.0;
  Kernel kernel;
  std::size_t dim = 0;
};

//! (1 / (N h^D)) sum_n K(|x - x_n| / h).
double kde_evaluate(const Sample& sample, const Kernel& kernel, double h,
                    std::span<const double> x);

PointwiseEstimate pointwise_estimate(const Sample& sample, const Kernel& kernel, double h,
                                     double b);
//! Same, reusing a precomputed distance matrix of `sample`.
PointwiseEstimate pointwise_estimate(const DistanceMatrix& distances, const Kernel& kernel,
                                     double h, double b);

enum class InterpolationMethod { piecewise_linear_1d, nearest_neighbor };

//! Extends values given at anchor points to the anchors' DomainBox; 0 outside it.
class Interpolant {
public:
  Interpolant(const Sample& anchors, std::span<const double> values,
              InterpolationMethod method);

  double operator()(std::span<const double> x) const;

  InterpolationMethod method() const noexcept { return method_; }
  const Sample& anchors() const noexcept { return anchors_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const DomainBox& domain() const noexcept { return domain_; }

  //! Exact integral of the 1-D piecewise-linear interpolant (trapezoid over the
  //! order statistics). Only valid for piecewise_linear_1d.
  double trapezoid_integral() const;

private:
  double linear(double x) const;
  double nearest(std::span<const double> x) const;

  InterpolationMethod method_;
  Sample anchors_;
  std::vector<double> values_;
  DomainBox domain_;
  // piecewise_linear_1d: distinct sorted abscissae and their values
  std::vector<double> xs_;
  std::vector<double> ys_;
};

Interpolant build_interpolant(const Sample& anchors, std::span<const double> values,
                              InterpolationMethod method);

//! Unnormalized KDE extension: max(KDE(x) - b K(0) / (N h^D), 0).
double f1_evaluate(const Sample& sample, const Kernel& kernel, double h, double b,
                   std::span<const double> x);

struct McEstimate {
  double integral = 0.0;
  double std_error = 0.0;
};

using DensityFn = std::function<double(std::span<const double>)>;

//! Uniform Monte Carlo integral of `density` over `domain` with m draws. Draw i is a
//! pure function of (seed, i), so results are deterministic and thread-count independent.
McEstimate mc_normalize(const DensityFn& density, const DomainBox& domain, std::size_t m,
                        std::uint64_t seed);

//! Default Monte Carlo draw count: max(100 * 2^D, 10^4).
std::size_t default_mc_samples(std::size_t dim);

enum class Variant { f1, f2 };
enum class InterpolationChoice { automatic, linear, nearest };

InterpolationMethod resolve_interpolation(InterpolationChoice choice, std::size_t dim);

//! Estimator settings that do not involve bandwidth selection.
struct ModelOptions {
  Kernel kernel{KernelFamily::gaussian};
  double b = 1.0;
  Variant variant = Variant::f2;
  InterpolationChoice interpolation = InterpolationChoice::automatic;
  std::size_t mc_samples = 0;  // 0 selects default_mc_samples(D)
};

//! A normalized MCDE density at a fixed bandwidth, in the coordinates of `anchors`.
struct DensityModel {
  Variant variant = Variant::f2;
  ModelOptions options;
  double h_star = 0.0;
  Sample anchors;
  PointwiseEstimate pointwise;
  std::optional<Interpolant> interpolant;  // f2 only
  DomainBox domain;
  double integral = 0.0;
  double integral_std_error = 0.0;
  double normalization_constant = 0.0;  // C1 or C2 = 1 / integral
  std::size_t mc_samples = 0;
  std::uint64_t mc_seed = 0;
  std::optional<WhiteningTransform> whitening;

  //! q_h(x) before normalization.
  double unnormalized(std::span<const double> x) const;
  //! C q_h(x).
  double density(std::span<const double> x) const;
  //! Normalized density at the anchors: C * pointwise values.
  std::vector<double> density_at_anchors() const;
};

//! Domain extension and normalization at a fixed bandwidth h.
DensityModel build_density_model(const Sample& sample, const DistanceMatrix& distances,
                                  const ModelOptions& options, double h,
                                  std::uint64_t mc_seed);
DensityModel build_density_model(const Sample& sample, const ModelOptions& options, double h,
                                 std::uint64_t mc_seed);

//! The model's normalization constant C (1 / integral of the unnormalized extension).
double normalization_constant_diagnostic(const DensityModel& model);

} // namespace mcde
