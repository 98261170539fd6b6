#include "mcde/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcde/error.hpp"
#include "mcde/parallel.hpp"
#include "mcde/rng.hpp"

namespace mcde {

namespace {

double bandwidth_volume(double h, std::size_t dim) {
  return std::pow(h, static_cast<double>(dim));
}

void check_point(const Sample& sample, std::span<const double> x) {
  if (x.size() != sample.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query point has D = " + std::to_string(x.size()) +
                                                  ", sample has D = " +
                                                  std::to_string(sample.dim()));
  }
}

} // namespace

// ---------------------------------------------------------------- DomainBox

double DomainBox::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

bool DomainBox::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  }
  return true;
}

DomainBox DomainBox::expanded(double margin) const {
  DomainBox out = *this;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    out.lo[k] -= margin;
    out.hi[k] += margin;
  }
  return out;
}

DomainBox DomainBox::bounding(const Sample& sample) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "bounding box of an empty sample");
  DomainBox box;
  const auto first = sample.point(0);
  box.lo.assign(first.begin(), first.end());
  box.hi.assign(first.begin(), first.end());
  for (std::size_t i = 1; i < sample.size(); ++i) {
    const auto x = sample.point(i);
    for (std::size_t k = 0; k < x.size(); ++k) {
      box.lo[k] = std::min(box.lo[k], x[k]);
      box.hi[k] = std::max(box.hi[k], x[k]);
    }
  }
  return box;
}

// ---------------------------------------------------------------- KDE link

double kde_evaluate(const Sample& sample, const Kernel& kernel, double h,
                    std::span<const double> x) {
  check_bandwidth(h);
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "KDE of an empty sample");
  check_point(sample, x);
  const double c = radial_normalization(kernel.family(), sample.dim());
  const double inv_h = 1.0 / h;
  double s = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    s += c * kernel.profile(euclidean_distance(x, sample.point(k)) * inv_h);
  }
  return s / (static_cast<double>(sample.size()) * bandwidth_volume(h, sample.dim()));
}

PointwiseEstimate pointwise_estimate(const DistanceMatrix& distances, const Kernel& kernel,
                                     double h, double b) {
  // Row sums with the diagonal weighted by (1 - b): identical to KDE(x_i) - b K(0)/(N h^D)
  // without the cancellation of the subtraction form.
  const auto sums = weight_row_sums(distances, kernel, h, b);
  const std::size_t n = distances.size();
  const double scale = static_cast<double>(n) * bandwidth_volume(h, distances.dim);

  PointwiseEstimate out;
  out.h = h;
  out.b = b;
  out.kernel = kernel;
  out.dim = distances.dim;
  out.raw.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.raw[i] = sums[i] / scale;
    if (out.raw[i] < 0.0) {
      out.values[i] = 0.0;
      ++out.clamped;
    } else {
      out.values[i] = out.raw[i];
    }
  }
  return out;
}

PointwiseEstimate pointwise_estimate(const Sample& sample, const Kernel& kernel, double h,
                                     double b) {
  check_bandwidth(h);
  check_bias(b);
  return pointwise_estimate(distance_matrix(sample), kernel, h, b);
}

double f1_evaluate(const Sample& sample, const Kernel& kernel, double h, double b,
                   std::span<const double> x) {
  check_bias(b);
  const double kde = kde_evaluate(sample, kernel, h, x);
  const double threshold = b * radial_normalization(kernel.family(), sample.dim()) /
                           (static_cast<double>(sample.size()) *
                            bandwidth_volume(h, sample.dim()));
  return std::max(kde - threshold, 0.0);
}

// ---------------------------------------------------------------- Interpolant

Interpolant::Interpolant(const Sample& anchors, std::span<const double> values,
                         InterpolationMethod method)
    : method_(method), anchors_(anchors), values_(values.begin(), values.end()) {
  if (anchors.empty()) throw Error(ErrorCode::EmptySample, "interpolant needs anchors");
  if (values.size() != anchors.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(values.size()) + " values for " +
                    std::to_string(anchors.size()) + " anchors");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParams, "anchor values must be finite");
  }
  if (method == InterpolationMethod::piecewise_linear_1d && anchors.dim() != 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "piecewise-linear interpolation needs D = 1, got D = " +
                    std::to_string(anchors.dim()));
  }
  domain_ = DomainBox::bounding(anchors);

  if (method == InterpolationMethod::piecewise_linear_1d) {
    std::vector<std::size_t> order(anchors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return anchors(a, 0) < anchors(b, 0); });
    // Ties collapse to one node carrying the mean of the tied values.
    for (std::size_t r = 0; r < order.size();) {
      const double x = anchors(order[r], 0);
      double sum = 0.0;
      std::size_t count = 0;
      for (; r < order.size() && anchors(order[r], 0) == x; ++r, ++count) sum += values_[order[r]];
      xs_.push_back(x);
      ys_.push_back(count == 1 ? sum : sum / static_cast<double>(count));
    }
  }
}

double Interpolant::linear(double x) const {
  if (x < xs_.front() || x > xs_.back()) return 0.0;
  const auto upper = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto i = static_cast<std::size_t>(upper - xs_.begin()) - 1;
  if (i + 1 >= xs_.size()) return ys_.back();
  const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + t * (ys_[i + 1] - ys_[i]);
}

double Interpolant::nearest(std::span<const double> x) const {
  if (!domain_.contains(x)) return 0.0;
  std::size_t best = 0;
  double best_d2 = squared_distance(x, anchors_.point(0));
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    const double d2 = squared_distance(x, anchors_.point(i));
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return values_[best];
}

double Interpolant::operator()(std::span<const double> x) const {
  if (x.size() != anchors_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query point has D = " + std::to_string(x.size()) +
                                                  ", interpolant has D = " +
                                                  std::to_string(anchors_.dim()));
  }
  return method_ == InterpolationMethod::piecewise_linear_1d ? linear(x[0]) : nearest(x);
}

double Interpolant::trapezoid_integral() const {
  if (method_ != InterpolationMethod::piecewise_linear_1d) {
    throw Error(ErrorCode::InvalidParams, "trapezoid integral needs a 1-D linear interpolant");
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    s += 0.5 * (xs_[i + 1] - xs_[i]) * (ys_[i] + ys_[i + 1]);
  }
  return s;
}

Interpolant build_interpolant(const Sample& anchors, std::span<const double> values,
                              InterpolationMethod method) {
  return Interpolant(anchors, values, method);
}

// ---------------------------------------------------------------- Monte Carlo

McEstimate mc_normalize(const DensityFn& density, const DomainBox& domain, std::size_t m,
                        std::uint64_t seed) {
  if (m < 1000) {
    throw Error(ErrorCode::InvalidParams, "Monte Carlo needs at least 1000 draws, got " +
                                              std::to_string(m));
  }
  const double volume = domain.volume();
  if (!(volume > 0.0) || !std::isfinite(volume)) {
    throw Error(ErrorCode::DegenerateDomain, "integration domain has volume " +
                                                 std::to_string(volume));
  }

  const std::size_t dim = domain.dim();
  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  std::vector<double> values(m);
  parallel_for(blocks, [&](std::size_t blk) {
    std::vector<double> x(dim);
    const std::size_t end = std::min(m, (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      CounterRng rng(seed, i);
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = domain.lo[k] + rng.uniform() * (domain.hi[k] - domain.lo[k]);
      }
      values[i] = density(x);
    }
  });

  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  return {volume * mean, volume * sd / std::sqrt(static_cast<double>(m))};
}

std::size_t default_mc_samples(std::size_t dim) {
  const double scaled = 100.0 * std::pow(2.0, static_cast<double>(dim));
  return std::max<std::size_t>(10000, static_cast<std::size_t>(scaled));
}

// ---------------------------------------------------------------- DensityModel

InterpolationMethod resolve_interpolation(InterpolationChoice choice, std::size_t dim) {
  switch (choice) {
    case InterpolationChoice::linear: return InterpolationMethod::piecewise_linear_1d;
    case InterpolationChoice::nearest: return InterpolationMethod::nearest_neighbor;
    case InterpolationChoice::automatic: break;
  }
  return dim == 1 ? InterpolationMethod::piecewise_linear_1d
                  : InterpolationMethod::nearest_neighbor;
}

double DensityModel::unnormalized(std::span<const double> x) const {
  if (variant == Variant::f2) return (*interpolant)(x);
  return f1_evaluate(anchors, options.kernel, h_star, options.b, x);
}

double DensityModel::density(std::span<const double> x) const {
  return normalization_constant * unnormalized(x);
}

std::vector<double> DensityModel::density_at_anchors() const {
  std::vector<double> out(pointwise.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = normalization_constant * pointwise.values[i];
  }
  return out;
}

DensityModel build_density_model(const Sample& sample, const DistanceMatrix& distances,
                                 const ModelOptions& options, double h,
                                 std::uint64_t mc_seed) {
  check_bandwidth(h);
  check_bias(options.b);
  if (distances.size() != sample.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distance matrix does not match the sample");
  }

  DensityModel model;
  model.variant = options.variant;
  model.options = options;
  model.h_star = h;
  model.anchors = sample;
  model.pointwise = pointwise_estimate(distances, options.kernel, h, options.b);
  model.mc_samples = options.mc_samples != 0 ? options.mc_samples
                                             : default_mc_samples(sample.dim());
  model.mc_seed = mc_seed;

  if (options.variant == Variant::f2) {
    model.interpolant.emplace(sample, model.pointwise.values,
                              resolve_interpolation(options.interpolation, sample.dim()));
    model.domain = model.interpolant->domain();
  } else {
    // Outside this box every sample point is farther than r h away, so the KDE
    // falls below the b K(0) / (N h^D) threshold and f1 vanishes.
    const double n = static_cast<double>(sample.size());
    const double fraction = options.b > 0.0 ? std::min(options.b / n, 0.5) : 1e-12 / n;
    model.domain =
        DomainBox::bounding(sample).expanded(h * options.kernel.tail_radius(fraction));
  }

  const McEstimate est = mc_normalize(
      [&model](std::span<const double> x) { return model.unnormalized(x); }, model.domain,
      model.mc_samples, mc_seed);
  if (!(est.integral > 0.0)) {
    throw Error(ErrorCode::ZeroDensityAtSamplePoint,
                "estimate integrates to zero at h = " + std::to_string(h));
  }
  model.integral = est.integral;
  model.integral_std_error = est.std_error;
  model.normalization_constant = 1.0 / est.integral;
  return model;
}

DensityModel build_density_model(const Sample& sample, const ModelOptions& options, double h,
                                 std::uint64_t mc_seed) {
  return build_density_model(sample, distance_matrix(sample), options, h, mc_seed);
}

double normalization_constant_diagnostic(const DensityModel& model) {
  return model.normalization_constant;
}

} // namespace mcde
