#include "mcde/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcde/error.hpp"
#include "mcde/parallel.hpp"

namespace mcde {

namespace {

void throw_zero_row(std::size_t m) {
  throw Error(ErrorCode::ZeroRow, "sample point " + std::to_string(m) +
                                      " has zero total weight; the bandwidth is too small "
                                      "for this kernel and sample");
}

} // namespace

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidBandwidth, "bandwidth must be positive and finite, got " +
                                                 std::to_string(h));
  }
}

void check_bias(double b) {
  if (!(b >= 0.0 && b <= 1.0)) {
    throw Error(ErrorCode::InvalidBias, "movement bias must lie in [0, 1], got " +
                                            std::to_string(b));
  }
}

DistanceMatrix distance_matrix(const Sample& sample, Metric metric) {
  (void)metric;  // only Euclidean
  const std::size_t n = sample.size();
  if (n < 2) {
    throw Error(ErrorCode::EmptySample, "distance matrix needs at least 2 points, got " +
                                            std::to_string(n));
  }
  DistanceMatrix out{SquareMatrix(n), sample.dim()};
  parallel_for(n, [&](std::size_t m) {
    auto row = out.d.row(m);
    const auto xm = sample.point(m);
    for (std::size_t k = 0; k < n; ++k) {
      row[k] = k == m ? 0.0 : euclidean_distance(xm, sample.point(k));
    }
  });
  return out;
}

WeightMatrix weight_matrix(const DistanceMatrix& d, const Kernel& kernel, double h, double b) {
  check_bandwidth(h);
  check_bias(b);
  const std::size_t n = d.size();
  const double c = radial_normalization(kernel.family(), d.dim);
  const double inv_h = 1.0 / h;
  WeightMatrix out{SquareMatrix(n), h, b, kernel, d.dim};
  parallel_for(n, [&](std::size_t m) {
    auto src = d.d.row(m);
    auto dst = out.w.row(m);
    for (std::size_t k = 0; k < n; ++k) dst[k] = c * kernel.profile(src[k] * inv_h);
    dst[m] *= (1.0 - b);
  });
  return out;
}

std::vector<double> weight_row_sums(const DistanceMatrix& d, const Kernel& kernel, double h,
                                    double b) {
  check_bandwidth(h);
  check_bias(b);
  const std::size_t n = d.size();
  const double c = radial_normalization(kernel.family(), d.dim);
  const double inv_h = 1.0 / h;
  std::vector<double> sums(n, 0.0);
  parallel_for(n, [&](std::size_t m) {
    auto src = d.d.row(m);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = c * kernel.profile(src[k] * inv_h);
      s += k == m ? w * (1.0 - b) : w;
    }
    sums[m] = s;
  });
  return sums;
}

TransitionMatrix transition_matrix(const WeightMatrix& w) {
  const std::size_t n = w.size();
  TransitionMatrix out{SquareMatrix(n)};
  for (std::size_t m = 0; m < n; ++m) {
    auto src = w.w.row(m);
    double s = 0.0;
    for (double v : src) s += v;
    if (!(s > 0.0)) throw_zero_row(m);
    auto dst = out.q.row(m);
    for (std::size_t k = 0; k < n; ++k) dst[k] = src[k] / s;
  }
  return out;
}

StationaryVector stationary_distribution(const WeightMatrix& w) {
  const std::size_t n = w.size();
  StationaryVector out{std::vector<double>(n, 0.0)};
  double total = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (double v : w.w.row(m)) s += v;
    if (!(s > 0.0)) throw_zero_row(m);
    out.pi[m] = s;
    total += s;
  }
  for (double& p : out.pi) p /= total;
  return out;
}

double stationarity_residual(const StationaryVector& pi, const TransitionMatrix& q) {
  const std::size_t n = q.size();
  std::vector<double> next(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const auto row = q.q.row(m);
    for (std::size_t k = 0; k < n; ++k) next[k] += pi.pi[m] * row[k];
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(next[k] - pi.pi[k]));
  return worst;
}

} // namespace mcde
