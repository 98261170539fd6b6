#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcde/chain.hpp"
#include "mcde/estimator.hpp"
#include "mcde/sample.hpp"

namespace mcde {

//! Raw grid description. With n_scaling the endpoints are divided by sqrt(N).
struct GridSpec {
  double min_raw = 1.0;
  double max_raw = 100.0;
  std::size_t count = 20;
  bool log_spaced = true;
  bool n_scaling = true;
};

class BandwidthGrid {
public:
  BandwidthGrid(const GridSpec& spec, std::size_t n);
  //! Explicit values; must be positive and strictly increasing.
  explicit BandwidthGrid(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::optional<GridSpec>& spec() const noexcept { return spec_; }

private:
  std::vector<double> values_;
  std::optional<GridSpec> spec_;
};

struct LossPoint {
  double h = 0.0;
  double loss = 0.0;
  bool failed = false;
  std::string failure;  // diagnostic when failed
};

struct LossCurve {
  std::vector<LossPoint> points;
  std::size_t argmin = 0;

  //! Recomputes argmin over non-failed points; ties go to the smaller h.
  //! Throws AllGridPointsFailed when nothing survives.
  void select();
  double h_star() const { return points.at(argmin).h; }
};

//! -sum_j log density(x_j). Throws ZeroDensityAtSamplePoint when a value is not positive.
double loss_nll(const DensityFn& density, const Sample& sample);
//! Same, for density values already evaluated at the sample points.
double loss_nll(std::span<const double> density_at_points);

//! -sum_i log((1/(N h^D)) sum_{k != i} K(d_ik / h)).
double loss_loo(const Sample& sample, const Kernel& kernel, double h);
double loss_loo(const DistanceMatrix& distances, const Kernel& kernel, double h);

//! Plain KDE negative log-likelihood at the sample points (no leave-one-out, no
//! normalization). Degenerates toward h = 0; kept as a diagnostic.
double loss_kde_in_sample(const DistanceMatrix& distances, const Kernel& kernel, double h);

//! k-fold cross-validated KDE bandwidth: one seeded shuffle, `folds` contiguous blocks,
//! summed held-out negative log KDE. Returns the grid value with minimal total.
double kde_kfold_cv(const Sample& sample, const Kernel& kernel, const BandwidthGrid& grid,
                    std::size_t folds, std::uint64_t seed, LossCurve* curve = nullptr);

enum class Optimizer { nll, loo, kde_cv };

std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view name);
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
std::string_view to_string(InterpolationChoice c);
InterpolationChoice parse_interpolation(std::string_view name);

struct FitConfig {
  ModelOptions model;
  GridSpec grid;
  Optimizer optimizer = Optimizer::nll;
  std::size_t folds = 5;
  std::uint64_t seed = 42;
};

struct OptimizeResult {
  double h_star = 0.0;
  LossCurve curve;
  std::size_t grid_index = 0;
  //! For the nll optimizer, the normalized model at h_star (already computed by the scan).
  std::optional<DensityModel> model;
};

//! Scores every grid value with the selected loss and returns the minimizer. The nll
//! path builds, normalizes and scores a model per grid point with MC seed = seed + index.
OptimizeResult optimize(const Sample& sample, const FitConfig& config);
OptimizeResult optimize(const Sample& sample, const DistanceMatrix& distances,
                        const FitConfig& config);

} // namespace mcde
