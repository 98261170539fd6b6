#include "mcde/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mcde/error.hpp"
#include "mcde/fit.hpp"
#include "mcde/parallel.hpp"
#include "mcde/preprocess.hpp"

namespace mcde {

NeighborIndex knn(const Sample& sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k < 1 || k + 1 > n) {
    throw Error(ErrorCode::KOutOfRange, "k must lie in [1, N - 1], got k = " +
                                            std::to_string(k) + " with N = " + std::to_string(n));
  }
  NeighborIndex index(n, k);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(n - 1);
    const auto xi = sample.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(squared_distance(xi, sample.point(j)), j);
    }
    // Pair ordering compares distance first, then index.
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    auto ids = index.neighbors(i);
    auto ds = index.distances(i);
    for (std::size_t r = 0; r < k; ++r) {
      ids[r] = cand[r].second;
      ds[r] = std::sqrt(cand[r].first);
    }
  });
  return index;
}

ScoreResult anomaly_scores(std::span<const double> density_values, const NeighborIndex& nn) {
  if (density_values.size() != nn.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(density_values.size()) + " density values for " +
                    std::to_string(nn.size()) + " points");
  }
  for (double v : density_values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParams, "density values must be finite and non-negative");
    }
  }
  ScoreResult out;
  out.scores.resize(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j : nn.neighbors(i)) sum += density_values[j];
    const double mean = sum / static_cast<double>(nn.k());
    const double own = density_values[i];
    if (own > 0.0) {
      out.scores[i] = mean / own;
    } else if (mean > 0.0) {
      out.scores[i] = std::numeric_limits<double>::infinity();
    } else {
      out.scores[i] = 1.0;
      ++out.degenerate;
    }
  }
  return out;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
  const std::size_t n = scores.size();
  if (labels.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                                  std::to_string(n) + " scores");
  }
  std::size_t positives = 0;
  for (bool l : labels) positives += l ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::DegenerateLabels, "AUC needs at least one outlier and one inlier");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::InvalidParams, "scores must not be NaN");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from mid-ranks; all quantities are exact half-integers.
  double positive_rank_sum = 0.0;
  for (std::size_t r = 0; r < n;) {
    std::size_t end = r + 1;
    while (end < n && scores[order[end]] == scores[order[r]]) ++end;
    const double mid_rank = 0.5 * static_cast<double>(r + 1 + end);
    for (std::size_t t = r; t < end; ++t) {
      if (labels[order[t]]) positive_rank_sum += mid_rank;
    }
    r = end;
  }
  const double np = static_cast<double>(positives);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

std::vector<OutlierReport> detect(const Sample& sample, std::span<const std::size_t> ks,
                                  const DetectOptions& options,
                                  const std::optional<std::vector<bool>>& labels) {
  if (labels && labels->size() != sample.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(labels->size()) +
                                                  " labels for " + std::to_string(sample.size()) +
                                                  " points");
  }
  const Sample work = options.whiten ? whiten(sample).first : sample;
  const DensityModel model = fit_mcde(work, options.fit);
  // The normalization constant cancels in the score ratio; use the pointwise values.
  const auto& density = model.pointwise.values;

  std::vector<OutlierReport> reports;
  reports.reserve(ks.size());
  for (std::size_t k : ks) {
    const NeighborIndex nn = knn(work, k);
    ScoreResult scored = anomaly_scores(density, nn);
    OutlierReport report;
    report.k = k;
    report.h_star = model.h_star;
    report.degenerate = scored.degenerate;
    report.scores = std::move(scored.scores);
    if (labels) {
      report.labels = *labels;
      report.auc = auc(report.scores, *labels);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

OutlierReport detect(const Sample& sample, std::size_t k, const DetectOptions& options,
                     const std::optional<std::vector<bool>>& labels) {
  const std::size_t ks[] = {k};
  return std::move(detect(sample, ks, options, labels).front());
}

} // namespace mcde
