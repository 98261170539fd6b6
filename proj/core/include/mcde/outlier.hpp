#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcde/bandwidth.hpp"
#include "mcde/sample.hpp"

namespace mcde {

//! Exact k nearest neighbours of every sample point, self excluded, ascending by
//! distance with ties broken by the lower index.
class NeighborIndex {
public:
  NeighborIndex(std::size_t n, std::size_t k) : n_(n), k_(k), idx_(n * k), dist_(n * k) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::span<const std::size_t> neighbors(std::size_t i) const { return {idx_.data() + i * k_, k_}; }
  std::span<const double> distances(std::size_t i) const { return {dist_.data() + i * k_, k_}; }
  std::span<std::size_t> neighbors(std::size_t i) { return {idx_.data() + i * k_, k_}; }
  std::span<double> distances(std::size_t i) { return {dist_.data() + i * k_, k_}; }

private:
  std::size_t n_;
  std::size_t k_;
  std::vector<std::size_t> idx_;
  std::vector<double> dist_;
};

NeighborIndex knn(const Sample& sample, std::size_t k);

struct ScoreResult {
  std::vector<double> scores;
  std::size_t degenerate = 0;  // 0/0 cases scored as 1
};

//! S_k(x_i) = mean(density over the k neighbours of i) / density_i. A zero own density
//! with a positive neighbour mean scores +inf; 0/0 scores 1 and is counted.
ScoreResult anomaly_scores(std::span<const double> density_values, const NeighborIndex& nn);

//! Probability that a random outlier (label true) outscores a random inlier, ties 1/2.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

struct OutlierReport {
  std::vector<double> scores;
  std::size_t k = 0;
  std::optional<std::vector<bool>> labels;
  std::optional<double> auc;
  double h_star = 0.0;
  std::size_t degenerate = 0;
};

struct DetectOptions {
  FitConfig fit;
  bool whiten = true;
};

//! Whitens (optionally), selects h* with the configured optimizer, takes the pointwise
//! estimate at h* as the density, and scores every point for each k in `ks`.
std::vector<OutlierReport> detect(const Sample& sample, std::span<const std::size_t> ks,
                                  const DetectOptions& options,
                                  const std::optional<std::vector<bool>>& labels = std::nullopt);

OutlierReport detect(const Sample& sample, std::size_t k, const DetectOptions& options,
                     const std::optional<std::vector<bool>>& labels = std::nullopt);

} // namespace mcde
