#include "mcde/bench.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "mcde/error.hpp"
#include "mcde/io.hpp"
#include "mcde/parallel.hpp"
#include "mcde/preprocess.hpp"
#include "mcde/rng.hpp"

namespace mcde {

double emse(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) {
    throw Error(ErrorCode::DimensionMismatch, "EMSE needs equally many true and estimated values");
  }
  if (truth.empty()) throw Error(ErrorCode::EmptySample, "EMSE of an empty sample");
  double s = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double e = truth[j] - estimate[j];
    s += e * e;
  }
  return s / static_cast<double>(truth.size());
}

double emse(const DensityFn& true_pdf, const DensityFn& estimate, const Sample& sample) {
  std::vector<double> t(sample.size());
  std::vector<double> e(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    t[j] = true_pdf(sample.point(j));
    e[j] = estimate(sample.point(j));
  }
  return emse(t, e);
}

double performance_ratio(double avg_emse_kde, double avg_emse_mcde) {
  return avg_emse_kde / avg_emse_mcde;
}

std::string_view to_string(McdeSelection s) {
  switch (s) {
    case McdeSelection::nll: return "nll";
    case McdeSelection::loo: return "loo";
    case McdeSelection::kde_cv: return "kde-cv";
    case McdeSelection::shared: return "shared";
  }
  return "unknown";
}

McdeSelection parse_mcde_selection(std::string_view name) {
  if (name == "shared") return McdeSelection::shared;
  switch (parse_optimizer(name)) {
    case Optimizer::nll: return McdeSelection::nll;
    case Optimizer::loo: return McdeSelection::loo;
    case Optimizer::kde_cv: return McdeSelection::kde_cv;
  }
  return McdeSelection::nll;
}

std::pair<double, std::optional<double>> mean_and_half_width(std::span<const double> xs) {
  if (xs.empty()) return {0.0, std::nullopt};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, std::nullopt};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double r = static_cast<double>(xs.size());
  const double sd = std::sqrt(ss / (r - 1.0));
  return {m, 2.0 * sd / std::sqrt(r)};
}

// ---------------------------------------------------------------- density experiment

void DEExperimentConfig::validate() const {
  spec.validate();
  if (realizations < 1) throw Error(ErrorCode::InvalidParams, "realizations must be >= 1");
  if (training_repeats < 1) throw Error(ErrorCode::InvalidParams, "training repeats must be >= 1");
  if (dims.empty() || sizes.empty()) {
    throw Error(ErrorCode::InvalidParams, "experiment needs at least one D and one N");
  }
  for (std::size_t d : dims) {
    if (d < 1) throw Error(ErrorCode::InvalidParams, "dimensions must be >= 1");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= 2) throw Error(ErrorCode::TooFewPoints, "sample sizes must exceed 2");
    if (i > 0 && !(sizes[i] > sizes[i - 1])) {
      throw Error(ErrorCode::InvalidParams, "sample sizes must be strictly ascending");
    }
  }
  check_bias(fit.model.b);
}

namespace {

double select_mcde_bandwidth(const Sample& white, const DEExperimentConfig& config, double h_kde,
                             std::uint64_t seed) {
  FitConfig fc = config.fit;
  fc.seed = seed;
  switch (config.mcde_selection) {
    case McdeSelection::shared: return h_kde;
    case McdeSelection::nll: fc.optimizer = Optimizer::nll; break;
    case McdeSelection::loo: fc.optimizer = Optimizer::loo; break;
    case McdeSelection::kde_cv: fc.optimizer = Optimizer::kde_cv; break;
  }
  return optimize(white, fc).h_star;
}

struct RealizationResult {
  double emse_mcde = 0.0;
  double emse_kde = 0.0;
  std::optional<std::string> failure;
};

} // namespace

DEReport run_de_experiment(const DEExperimentConfig& config) {
  config.validate();
  DEReport report;
  report.config = config;
  const Kernel kernel = config.fit.model.kernel;
  const std::size_t r_count = config.realizations;

  for (std::size_t d : config.dims) {
    std::optional<double> base_mcde;
    std::optional<double> base_kde;
    for (std::size_t si = 0; si < config.sizes.size(); ++si) {
      const std::size_t n = config.sizes[si];
      DECell cell;
      cell.dim = d;
      cell.n = n;
      try {
        double h_m = 0.0;
        double h_k = 0.0;
        for (std::size_t t = 0; t < config.training_repeats; ++t) {
          const Sample train = sample_product(config.spec, n, d, derive_seed(config.seed, d, n, 1000 + t));
          const Sample white = whiten(train).first;
          const BandwidthGrid grid(config.fit.grid, n);
          const double hk = kde_kfold_cv(white, kernel, grid, config.fit.folds,
                                         derive_seed(config.seed, d, n, 2000 + t));
          h_k += hk;
          h_m += select_mcde_bandwidth(white, config, hk, derive_seed(config.seed, d, n, 3000 + t));
        }
        cell.h_mcde = h_m / static_cast<double>(config.training_repeats);
        cell.h_kde = h_k / static_cast<double>(config.training_repeats);

        std::vector<RealizationResult> results(r_count);
        parallel_for(r_count, [&](std::size_t r) {
          RealizationResult& out = results[r];
          try {
            const std::uint64_t rs = config.seed + r;
            const Sample test = sample_product(config.spec, n, d, derive_seed(rs, d, n));
            const auto [white, transform] = whiten(test);
            std::vector<double> truth(n);
            for (std::size_t j = 0; j < n; ++j) {
              truth[j] = transform.whitened_density(pdf_eval(config.spec, test.point(j)));
            }
            const DistanceMatrix distances = distance_matrix(white);
            const DensityModel model = build_density_model(white, distances, config.fit.model,
                                                           cell.h_mcde, derive_seed(rs, d, n, 7));
            out.emse_mcde = emse(truth, model.density_at_anchors());
            const PointwiseEstimate kde = pointwise_estimate(distances, kernel, cell.h_kde, 0.0);
            out.emse_kde = emse(truth, kde.values);
          } catch (const Error& e) {
            out.failure = e.what();
          }
        });

        for (std::size_t r = 0; r < r_count; ++r) {
          if (results[r].failure) {
            cell.failure = "realization " + std::to_string(r) + ": " + *results[r].failure;
            break;
          }
          cell.emse_mcde.push_back(results[r].emse_mcde);
          cell.emse_kde.push_back(results[r].emse_kde);
        }
      } catch (const Error& e) {
        cell.failure = std::string("training: ") + e.what();
      }

      if (!cell.failure) {
        std::tie(cell.avg_emse_mcde, cell.half_width_mcde) = mean_and_half_width(cell.emse_mcde);
        std::tie(cell.avg_emse_kde, cell.half_width_kde) = mean_and_half_width(cell.emse_kde);
        cell.performance_ratio = performance_ratio(cell.avg_emse_kde, cell.avg_emse_mcde);
        if (si == 0) {
          base_mcde = cell.avg_emse_mcde;
          base_kde = cell.avg_emse_kde;
        }
        if (base_mcde && base_kde) {
          cell.scaled_emse_mcde = cell.avg_emse_mcde / *base_mcde;
          cell.scaled_emse_kde = cell.avg_emse_kde / *base_kde;
          if (cell.half_width_mcde) cell.scaled_half_width_mcde = *cell.half_width_mcde / *base_mcde;
          if (cell.half_width_kde) cell.scaled_half_width_kde = *cell.half_width_kde / *base_kde;
        }
      } else {
        cell.emse_mcde.clear();
        cell.emse_kde.clear();
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_realizations_csv(const DEReport& report, std::ostream& out) {
  out << "dim,n,realization,emse_mcde,emse_kde\n";
  for (const auto& cell : report.cells) {
    for (std::size_t r = 0; r < cell.emse_mcde.size(); ++r) {
      out << cell.dim << ',' << cell.n << ',' << r << ',' << format_double(cell.emse_mcde[r])
          << ',' << format_double(cell.emse_kde[r]) << '\n';
    }
  }
}

// ---------------------------------------------------------------- outlier experiment

void OutlierExperimentConfig::validate() const {
  if (datasets.empty() || dims.empty() || ks.empty()) {
    throw Error(ErrorCode::InvalidParams, "experiment needs datasets, dims and ks");
  }
  if (realizations < 1) throw Error(ErrorCode::InvalidParams, "realizations must be >= 1");
  for (const auto& ds : datasets) {
    ds.inlier.validate();
    ds.outlier.validate();
    if (ds.n_in < 1 || ds.n_out < 1) {
      throw Error(ErrorCode::InvalidParams, "dataset '" + ds.name + "' needs n_in, n_out >= 1");
    }
  }
  for (std::size_t d : dims) {
    if (d < 1) throw Error(ErrorCode::InvalidParams, "dimensions must be >= 1");
  }
  for (std::size_t k : ks) {
    if (k < 1) throw Error(ErrorCode::KOutOfRange, "k must be >= 1");
  }
}

OutlierExperimentReport run_outlier_experiment(const OutlierExperimentConfig& config) {
  config.validate();
  OutlierExperimentReport report;
  report.config = config;

  for (std::size_t a = 0; a < config.datasets.size(); ++a) {
    const OutlierDatasetSpec& ds = config.datasets[a];
    const std::size_t n = ds.n_in + ds.n_out;
    std::vector<std::size_t> valid_ks;
    for (std::size_t k : config.ks) {
      if (k + 1 <= n) valid_ks.push_back(k);
    }

    for (std::size_t d : config.dims) {
      // aucs[r][index into valid_ks]
      std::vector<std::vector<double>> aucs(config.realizations);
      std::vector<std::optional<std::string>> failures(config.realizations);
      parallel_for(config.realizations, [&](std::size_t r) {
        try {
          const std::uint64_t rs = config.seed + r;
          const LabeledSample ls =
              sample_mixture(ds.inlier, ds.outlier, ds.n_in, ds.n_out, d, derive_seed(rs, a, d));
          DetectOptions opt = config.detect;
          opt.fit.seed = derive_seed(rs, a, d, 1);
          const auto reports = detect(ls.points, valid_ks, opt, ls.labels);
          for (const auto& rep : reports) aucs[r].push_back(*rep.auc);
        } catch (const Error& e) {
          failures[r] = e.what();
        }
      });

      std::optional<std::string> failure;
      for (std::size_t r = 0; r < config.realizations; ++r) {
        if (failures[r]) {
          failure = "realization " + std::to_string(r) + ": " + *failures[r];
          break;
        }
      }

      std::size_t vi = 0;
      for (std::size_t k : config.ks) {
        AucCell cell;
        cell.dataset = ds.name;
        cell.dim = d;
        cell.k = k;
        cell.below_locality = k < ds.n_out;
        if (k + 1 > n) {
          cell.failure = "k = " + std::to_string(k) + " exceeds N - 1 = " + std::to_string(n - 1);
        } else if (failure) {
          cell.failure = failure;
          ++vi;
        } else {
          for (std::size_t r = 0; r < config.realizations; ++r) cell.aucs.push_back(aucs[r][vi]);
          std::tie(cell.mean_auc, cell.half_width) = mean_and_half_width(cell.aucs);
          ++vi;
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

} // namespace mcde
