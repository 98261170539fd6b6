#pragma once

#include "mcde/bandwidth.hpp"
#include "mcde/estimator.hpp"
#include "mcde/sample.hpp"

namespace mcde {

/// Full MCDE fit: for every bandwidth in the grid build the b-biased stationary
/// estimate, extend it to R^D, normalize it, and score it; return the model at
/// the loss minimizer h*. With optimizer = loo or kde-cv only the selection of h*
/// changes; the returned model is always normalized.
///
/// Requires N >= 2. Grid points that fail (zero row, zero density at a sample point)
/// are skipped and reported in `curve`.
DensityModel fit_mcde(const Sample& sample, const FitConfig& config, LossCurve* curve = nullptr);

/// Whitens `raw` first, fits in whitened coordinates, and attaches the transform.
DensityModel fit_mcde_whitened(const Sample& raw, const FitConfig& config,
                               LossCurve* curve = nullptr);

} // namespace mcde
