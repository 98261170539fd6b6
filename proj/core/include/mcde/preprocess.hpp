#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mcde/sample.hpp"

namespace mcde {

//! Affine map y = T (x - mean) with T the symmetric inverse square root of the
//! sample covariance (unbiased, N - 1 denominator).
struct WhiteningTransform {
  std::vector<double> mean;       // D
  std::vector<double> transform;  // D x D, row-major
  std::vector<double> inverse;    // D x D, row-major
  double log_abs_det = 0.0;       // log |det transform|

  std::size_t dim() const noexcept { return mean.size(); }

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> invert(std::span<const double> y) const;
  Sample apply(const Sample& sample) const;

  //! Density of the whitened variable given the raw-space density value: f_w = f / |det T|.
  double whitened_density(double raw_density) const;
  //! Raw-space density given the whitened-space density value: f = f_w |det T|.
  double raw_density(double whitened_density) const;
};

std::pair<Sample, WhiteningTransform> whiten(const Sample& sample);

enum class BoundarySide { lower };

//! Doubles a 1-D sample by mirroring it about `boundary`: {x_i} followed by {2 boundary - x_i}.
Sample reflect_boundary(const Sample& sample, double boundary, BoundarySide side = BoundarySide::lower);

enum class VariableTransform { log, logit };

Sample transform_variable(const Sample& sample, VariableTransform kind);
Sample inverse_transform_variable(const Sample& sample, VariableTransform kind);

} // namespace mcde
