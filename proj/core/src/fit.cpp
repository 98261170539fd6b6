#include "mcde/fit.hpp"

#include <string>

#include "mcde/error.hpp"
#include "mcde/preprocess.hpp"

namespace mcde {

DensityModel fit_mcde(const Sample& sample, const FitConfig& config, LossCurve* curve) {
  if (sample.size() < 2) {
    throw Error(ErrorCode::TooFewPoints,
                "fitting needs N >= 2, got N = " + std::to_string(sample.size()));
  }
  check_bias(config.model.b);
  const DistanceMatrix distances = distance_matrix(sample);
  OptimizeResult opt = optimize(sample, distances, config);
  if (curve != nullptr) *curve = opt.curve;
  if (opt.model) return std::move(*opt.model);
  return build_density_model(sample, distances, config.model, opt.h_star,
                             config.seed + opt.grid_index);
}

DensityModel fit_mcde_whitened(const Sample& raw, const FitConfig& config, LossCurve* curve) {
  auto [white, transform] = whiten(raw);
  DensityModel model = fit_mcde(white, config, curve);
  model.whitening = std::move(transform);
  return model;
}

} // namespace mcde
