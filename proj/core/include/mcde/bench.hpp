#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcde/bandwidth.hpp"
#include "mcde/outlier.hpp"
#include "mcde/synthdata.hpp"

namespace mcde {

//! (1/N) sum_j (truth_j - estimate_j)^2.
double emse(std::span<const double> truth, std::span<const double> estimate);
double emse(const DensityFn& true_pdf, const DensityFn& estimate, const Sample& sample);

//! <EMSE>_KDE / <EMSE>_MCDE; above 1 means MCDE has the smaller error.
double performance_ratio(double avg_emse_kde, double avg_emse_mcde);

//! Bandwidth selection for the MCDE side of a density experiment. `shared` reuses
//! the KDE cross-validated bandwidth.
enum class McdeSelection { nll, loo, kde_cv, shared };
std::string_view to_string(McdeSelection s);
McdeSelection parse_mcde_selection(std::string_view name);

struct DEExperimentConfig {
  DistributionSpec spec = DistributionSpec::chi_squared(5.0);
  std::vector<std::size_t> dims{3};
  std::vector<std::size_t> sizes{100, 500, 2000};
  std::size_t realizations = 8;
  std::size_t training_repeats = 2;
  McdeSelection mcde_selection = McdeSelection::nll;
  //! Kernel, b, variant, grid, MC count and folds; the optimizer field is ignored.
  FitConfig fit;
  std::uint64_t seed = 42;

  void validate() const;
};

struct DECell {
  std::size_t dim = 0;
  std::size_t n = 0;
  double h_mcde = 0.0;
  double h_kde = 0.0;
  std::vector<double> emse_mcde;  // per realization
  std::vector<double> emse_kde;
  double avg_emse_mcde = 0.0;
  double avg_emse_kde = 0.0;
  std::optional<double> half_width_mcde;  // 2 sigma of the mean; absent for R = 1
  std::optional<double> half_width_kde;
  double performance_ratio = 0.0;
  std::optional<double> scaled_emse_mcde;  // divided by the first size of the same D
  std::optional<double> scaled_emse_kde;
  std::optional<double> scaled_half_width_mcde;
  std::optional<double> scaled_half_width_kde;
  std::optional<std::string> failure;
};

struct DEReport {
  DEExperimentConfig config;
  std::vector<DECell> cells;  // dims outer, sizes inner
};

//! Per (D, N): average the selected bandwidths over `training_repeats` fresh training
//! samples, then draw R test samples, whiten each, estimate with MCDE and KDE at the
//! fixed bandwidths, and score both against the whitened true density at the points.
DEReport run_de_experiment(const DEExperimentConfig& config);

//! One row per (cell, realization): dim, n, realization, emse_mcde, emse_kde.
void write_realizations_csv(const DEReport& report, std::ostream& out);

struct OutlierExperimentConfig {
  std::vector<OutlierDatasetSpec> datasets{outlier_dataset(1), outlier_dataset(2),
                                           outlier_dataset(3)};
  std::vector<std::size_t> dims{2, 4, 6};
  std::vector<std::size_t> ks{5, 10, 20, 40, 75, 100};
  std::size_t realizations = 8;
  DetectOptions detect;
  std::uint64_t seed = 42;

  void validate() const;
};

struct AucCell {
  std::string dataset;
  std::size_t dim = 0;
  std::size_t k = 0;
  std::vector<double> aucs;  // per realization
  double mean_auc = 0.0;
  std::optional<double> half_width;
  bool below_locality = false;  // k < (1 - c) N, i.e. k < N_out
  std::optional<std::string> failure;
};

struct OutlierExperimentReport {
  OutlierExperimentConfig config;
  std::vector<AucCell> cells;  // datasets, then dims, then ks
};

//! AUC per (dataset, D, k), averaged over realizations. Each realization fits once
//! and scores every k.
OutlierExperimentReport run_outlier_experiment(const OutlierExperimentConfig& config);

//! Mean and 2 sigma half-width of the mean (absent for fewer than two values).
std::pair<double, std::optional<double>> mean_and_half_width(std::span<const double> xs);

} // namespace mcde
