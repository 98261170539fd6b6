#include "mcde/bandwidth.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mcde/error.hpp"
#include "mcde/parallel.hpp"
#include "mcde/rng.hpp"

namespace mcde {

namespace {

double log_of_positive(double v, std::size_t j) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::ZeroDensityAtSamplePoint,
                "density at sample point " + std::to_string(j) + " is " + std::to_string(v));
  }
  return std::log(v);
}

} // namespace

// ---------------------------------------------------------------- grid

BandwidthGrid::BandwidthGrid(const GridSpec& spec, std::size_t n) : spec_(spec) {
  if (spec.count == 0) throw Error(ErrorCode::InvalidParams, "grid needs at least one value");
  if (!(spec.min_raw > 0.0) || !(spec.max_raw >= spec.min_raw) || !std::isfinite(spec.max_raw)) {
    throw Error(ErrorCode::InvalidBandwidth, "grid bounds must satisfy 0 < min <= max");
  }
  if (spec.count > 1 && !(spec.max_raw > spec.min_raw)) {
    throw Error(ErrorCode::InvalidParams, "grid with several values needs min < max");
  }
  if (spec.n_scaling && n == 0) throw Error(ErrorCode::EmptySample, "grid scaling needs N > 0");

  const double scale = spec.n_scaling ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  const double lo = spec.min_raw * scale;
  const double hi = spec.max_raw * scale;
  values_.resize(spec.count);
  if (spec.count == 1) {
    values_[0] = lo;
    return;
  }
  const double steps = static_cast<double>(spec.count - 1);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const double t = static_cast<double>(i) / steps;
    values_[i] = spec.log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                 : lo + t * (hi - lo);
  }
  values_.front() = lo;
  values_.back() = hi;
}

BandwidthGrid::BandwidthGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidParams, "grid needs at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    check_bandwidth(values_[i]);
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw Error(ErrorCode::InvalidParams, "grid values must be strictly increasing");
    }
  }
}

void LossCurve::select() {
  bool found = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.failed || !std::isfinite(p.loss)) continue;
    // Strict comparison keeps the earliest (smallest h) of tied minima.
    if (!found || p.loss < points[argmin].loss) {
      argmin = i;
      found = true;
    }
  }
  if (!found) {
    std::string why = points.empty() ? "empty grid" : points.back().failure;
    throw Error(ErrorCode::AllGridPointsFailed,
                "no bandwidth in the grid produced a finite loss (last failure: " + why + ")");
  }
}

// ---------------------------------------------------------------- losses

double loss_nll(std::span<const double> density_at_points) {
  double s = 0.0;
  for (std::size_t j = 0; j < density_at_points.size(); ++j) {
    s -= log_of_positive(density_at_points[j], j);
  }
  return s;
}

double loss_nll(const DensityFn& density, const Sample& sample) {
  double s = 0.0;
  for (std::size_t j = 0; j < sample.size(); ++j) s -= log_of_positive(density(sample.point(j)), j);
  return s;
}

double loss_loo(const DistanceMatrix& distances, const Kernel& kernel, double h) {
  const auto sums = weight_row_sums(distances, kernel, h, 1.0);
  const double scale =
      static_cast<double>(distances.size()) * std::pow(h, static_cast<double>(distances.dim));
  double s = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) s -= log_of_positive(sums[i] / scale, i);
  return s;
}

double loss_loo(const Sample& sample, const Kernel& kernel, double h) {
  check_bandwidth(h);
  return loss_loo(distance_matrix(sample), kernel, h);
}

double loss_kde_in_sample(const DistanceMatrix& distances, const Kernel& kernel, double h) {
  const auto sums = weight_row_sums(distances, kernel, h, 0.0);
  const double scale =
      static_cast<double>(distances.size()) * std::pow(h, static_cast<double>(distances.dim));
  double s = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) s -= log_of_positive(sums[i] / scale, i);
  return s;
}

double kde_kfold_cv(const Sample& sample, const Kernel& kernel, const BandwidthGrid& grid,
                    std::size_t folds, std::uint64_t seed, LossCurve* curve) {
  const std::size_t n = sample.size();
  if (folds < 2 || n < folds || n < 2) {
    throw Error(ErrorCode::TooFewPoints, "k-fold CV needs folds >= 2 and N >= folds (N = " +
                                             std::to_string(n) + ", folds = " +
                                             std::to_string(folds) + ")");
  }
  const auto order = shuffled_indices(n, seed);
  std::vector<std::size_t> fold_of(n);
  std::vector<std::size_t> train_size(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * n / folds;
    const std::size_t end = (f + 1) * n / folds;
    for (std::size_t r = begin; r < end; ++r) fold_of[order[r]] = f;
    train_size[f] = n - (end - begin);
  }

  const DistanceMatrix distances = distance_matrix(sample);
  const double c = radial_normalization(kernel.family(), sample.dim());
  const double dim = static_cast<double>(sample.dim());

  LossCurve local;
  local.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    const double h = grid[g];
    const double inv_h = 1.0 / h;
    const double hd = std::pow(h, dim);
    LossPoint& p = local.points[g];
    p.h = h;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = distances.d.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (fold_of[k] != fold_of[j]) s += c * kernel.profile(row[k] * inv_h);
      }
      const double kde = s / (static_cast<double>(train_size[fold_of[j]]) * hd);
      if (!(kde > 0.0)) {
        p.failed = true;
        p.failure = "held-out point " + std::to_string(j) + " has zero KDE";
        p.loss = std::numeric_limits<double>::infinity();
        return;
      }
      total -= std::log(kde);
    }
    p.loss = total;
  });
  local.select();
  const double h_star = local.h_star();
  if (curve != nullptr) *curve = std::move(local);
  return h_star;
}

// ---------------------------------------------------------------- names

std::string_view to_string(Optimizer o) {
  switch (o) {
    case Optimizer::nll: return "nll";
    case Optimizer::loo: return "loo";
    case Optimizer::kde_cv: return "kde-cv";
  }
  return "unknown";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "nll") return Optimizer::nll;
  if (name == "loo") return Optimizer::loo;
  if (name == "kde-cv") return Optimizer::kde_cv;
  throw Error(ErrorCode::InvalidParams, "unknown optimizer '" + std::string(name) +
                                            "' (expected nll, loo or kde-cv)");
}

std::string_view to_string(Variant v) { return v == Variant::f1 ? "f1" : "f2"; }

Variant parse_variant(std::string_view name) {
  if (name == "f1") return Variant::f1;
  if (name == "f2") return Variant::f2;
  throw Error(ErrorCode::InvalidParams, "unknown variant '" + std::string(name) +
                                            "' (expected f1 or f2)");
}

std::string_view to_string(InterpolationChoice c) {
  switch (c) {
    case InterpolationChoice::automatic: return "auto";
    case InterpolationChoice::linear: return "linear";
    case InterpolationChoice::nearest: return "nearest";
  }
  return "unknown";
}

InterpolationChoice parse_interpolation(std::string_view name) {
  if (name == "auto") return InterpolationChoice::automatic;
  if (name == "linear") return InterpolationChoice::linear;
  if (name == "nearest") return InterpolationChoice::nearest;
  throw Error(ErrorCode::InvalidParams, "unknown interpolation '" + std::string(name) +
                                            "' (expected auto, linear or nearest)");
}

// ---------------------------------------------------------------- optimize

OptimizeResult optimize(const Sample& sample, const DistanceMatrix& distances,
                        const FitConfig& config) {
  const BandwidthGrid grid(config.grid, sample.size());
  OptimizeResult result;

  if (config.optimizer == Optimizer::kde_cv) {
    result.h_star = kde_kfold_cv(sample, config.model.kernel, grid, config.folds, config.seed,
                                 &result.curve);
    result.grid_index = result.curve.argmin;
    return result;
  }

  result.curve.points.resize(grid.size());
  std::vector<std::optional<DensityModel>> models(grid.size());

  parallel_for(grid.size(), [&](std::size_t g) {
    LossPoint& p = result.curve.points[g];
    p.h = grid[g];
    try {
      if (config.optimizer == Optimizer::loo) {
        p.loss = loss_loo(distances, config.model.kernel, p.h);
      } else {
        DensityModel model =
            build_density_model(sample, distances, config.model, p.h, config.seed + g);
        p.loss = loss_nll(model.density_at_anchors());
        models[g] = std::move(model);
      }
    } catch (const Error& e) {
      p.failed = true;
      p.failure = e.what();
      p.loss = std::numeric_limits<double>::infinity();
    }
  });

  result.curve.select();
  result.grid_index = result.curve.argmin;
  result.h_star = result.curve.h_star();
  if (config.optimizer == Optimizer::nll) result.model = std::move(models[result.grid_index]);
  return result;
}

OptimizeResult optimize(const Sample& sample, const FitConfig& config) {
  return optimize(sample, distance_matrix(sample), config);
}

} // namespace mcde
