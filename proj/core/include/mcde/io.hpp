#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcde/bandwidth.hpp"
#include "mcde/bench.hpp"
#include "mcde/estimator.hpp"
#include "mcde/outlier.hpp"
#include "mcde/preprocess.hpp"
#include "mcde/sample.hpp"

namespace mcde {

//! 17 significant digits, shortest of fixed/scientific; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

//! Comma-separated numbers, one observation per row. A first row that does not parse
//! as numbers is taken as a header. Blank lines are ignored.
Sample parse_csv(std::string_view text);
Sample load_csv(const std::string& path);

//! One 0/1 per line; true marks an outlier. Throws DimensionMismatch unless there are
//! exactly `n` labels.
std::vector<bool> parse_labels(std::string_view text, std::size_t n);
std::vector<bool> load_labels(const std::string& path, std::size_t n);

// ---------------------------------------------------------------- configs

//! Keys: kernel, b, variant, h_grid {min, max, count, log, scale_by_sqrt_n},
//! interpolation, mc_samples, seed, optimizer, folds. Missing keys keep `base` values.
FitConfig fit_config_from_json(std::string_view text, const FitConfig& base = {});
std::string fit_config_to_json(const FitConfig& config);

//! Keys: distribution, dims, sizes, realizations, training_repeats, mcde_optimizer,
//! seed, fit (a FitConfig object). Missing keys keep `base` values.
DEExperimentConfig de_config_from_json(std::string_view text,
                                       const DEExperimentConfig& base = {});

//! Keys: datasets (ids 1-3 or objects {name, inlier, outlier, n_in, n_out}), dims, ks,
//! realizations, seed, whiten, fit. Missing keys keep `base` values.
OutlierExperimentConfig outlier_config_from_json(std::string_view text,
                                                 const OutlierExperimentConfig& base = {});

// ---------------------------------------------------------------- models

struct Preprocessing {
  bool whiten = false;
  std::optional<double> reflect_lower;
  std::optional<VariableTransform> transform;
};

//! A fitted model together with how its training data was mapped into model space.
struct PersistedModel {
  DensityModel model;
  FitConfig config;
  Preprocessing preprocessing;
  std::optional<LossCurve> curve;
};

std::string model_to_json(const PersistedModel& persisted);
PersistedModel model_from_json(std::string_view text);

//! Maps raw query points into model coordinates: variable transform, then whitening.
//! Reflection only augments training data and is not applied to queries.
Sample to_model_space(const PersistedModel& persisted, const Sample& raw);

// ---------------------------------------------------------------- reports

std::string eval_report_to_json(const PersistedModel& persisted, const Sample& raw_queries);
std::string outlier_reports_to_json(const std::vector<OutlierReport>& reports);
std::string de_report_to_json(const DEReport& report);
std::string outlier_experiment_to_json(const OutlierExperimentReport& report);

} // namespace mcde
