// mcde: fit, evaluate and score with the Markov chain density estimator.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcde/bench.hpp"
#include "mcde/error.hpp"
#include "mcde/fit.hpp"
#include "mcde/io.hpp"
#include "mcde/outlier.hpp"
#include "mcde/parallel.hpp"
#include "mcde/preprocess.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

// Configuration problems detected before any work starts map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitFlags {
  std::string config_path;
  std::optional<std::string> kernel;
  std::optional<double> b;
  std::optional<std::string> variant;
  std::optional<std::string> interpolation;
  std::optional<std::size_t> mc_samples;
  std::optional<std::string> optimizer;
  std::optional<std::size_t> folds;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<std::size_t> grid_count;
  std::optional<std::uint64_t> seed;
};

struct Common {
  std::string input;
  std::string out;
  std::size_t threads = 0;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--config", f.config_path, "FitConfig JSON file");
  cmd->add_option("--kernel", f.kernel,
                  "gaussian|exponential|uniform|triangular|epanechnikov|cosine");
  cmd->add_option("--b", f.b, "movement bias in [0, 1]");
  cmd->add_option("--variant", f.variant, "f1|f2");
  cmd->add_option("--interpolation", f.interpolation, "auto|linear|nearest");
  cmd->add_option("--mc-samples", f.mc_samples, "Monte Carlo draws (0 = default)");
  cmd->add_option("--optimizer", f.optimizer, "nll|loo|kde-cv");
  cmd->add_option("--folds", f.folds, "folds for kde-cv");
  cmd->add_option("--grid-min", f.grid_min, "smallest raw grid value (before /sqrt(N))");
  cmd->add_option("--grid-max", f.grid_max, "largest raw grid value (before /sqrt(N))");
  cmd->add_option("--grid-count", f.grid_count, "number of grid values");
  cmd->add_option("--seed", f.seed, "base seed (fallback: MCDE_SEED, then 42)");
}

void add_common(CLI::App* cmd, Common& c, bool needs_input) {
  auto* in = cmd->add_option("--input", c.input, "input CSV");
  if (needs_input) in->required();
  cmd->add_option("--out", c.out, "output JSON (default: stdout)");
  cmd->add_option("--threads", c.threads, "worker thread cap (0 = all cores)");
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError(what + " '" + path + "' does not exist");
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("MCDE_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("MCDE_SEED='") + s + "' is not a non-negative integer");
  }
}

template <class F>
auto as_usage(F&& f) {
  try {
    return f();
  } catch (const mcde::Error& e) {
    throw UsageError(e.what());
  }
}

mcde::FitConfig resolve_fit_config(const FitFlags& f) {
  mcde::FitConfig c;
  if (auto s = env_seed()) c.seed = *s;
  if (!f.config_path.empty()) {
    require_file(f.config_path, "config file");
    c = as_usage([&] { return mcde::fit_config_from_json(mcde::read_file(f.config_path), c); });
  }
  as_usage([&] {
    if (f.kernel) c.model.kernel = mcde::Kernel(mcde::parse_kernel_family(*f.kernel));
    if (f.b) c.model.b = *f.b;
    if (f.variant) c.model.variant = mcde::parse_variant(*f.variant);
    if (f.interpolation) c.model.interpolation = mcde::parse_interpolation(*f.interpolation);
    if (f.mc_samples) c.model.mc_samples = *f.mc_samples;
    if (f.optimizer) c.optimizer = mcde::parse_optimizer(*f.optimizer);
    if (f.folds) c.folds = *f.folds;
    if (f.grid_min) c.grid.min_raw = *f.grid_min;
    if (f.grid_max) c.grid.max_raw = *f.grid_max;
    if (f.grid_count) c.grid.count = *f.grid_count;
    if (f.seed) c.seed = *f.seed;
    mcde::check_bias(c.model.b);
    return 0;
  });
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    mcde::write_file(path, text);
  }
}

// ---------------------------------------------------------------- commands

struct FitArgs {
  Common common;
  FitFlags flags;
  bool whiten = true;
  std::optional<double> reflect;
  std::optional<std::string> transform;
};

mcde::Preprocessing resolve_preprocessing(const FitArgs& a) {
  mcde::Preprocessing p;
  p.whiten = a.whiten;
  p.reflect_lower = a.reflect;
  if (a.transform) {
    if (*a.transform == "log") {
      p.transform = mcde::VariableTransform::log;
    } else if (*a.transform == "logit") {
      p.transform = mcde::VariableTransform::logit;
    } else {
      throw UsageError("--transform must be log or logit, got '" + *a.transform + "'");
    }
  }
  return p;
}

int run_fit(const FitArgs& a) {
  require_file(a.common.input, "input file");
  const mcde::FitConfig config = resolve_fit_config(a.flags);
  const mcde::Preprocessing pre = resolve_preprocessing(a);

  mcde::Sample x = mcde::load_csv(a.common.input);
  if (pre.transform) x = mcde::transform_variable(x, *pre.transform);
  if (pre.reflect_lower) x = mcde::reflect_boundary(x, *pre.reflect_lower);

  mcde::PersistedModel persisted;
  persisted.config = config;
  persisted.preprocessing = pre;
  mcde::LossCurve curve;
  persisted.model = pre.whiten ? mcde::fit_mcde_whitened(x, config, &curve)
                               : mcde::fit_mcde(x, config, &curve);
  persisted.curve = std::move(curve);
  emit(a.common.out, mcde::model_to_json(persisted));
  return kOk;
}

struct EvalArgs {
  Common common;
  std::string model;
};

int run_eval(const EvalArgs& a) {
  require_file(a.model, "model file");
  require_file(a.common.input, "input file");
  const mcde::PersistedModel persisted =
      as_usage([&] { return mcde::model_from_json(mcde::read_file(a.model)); });
  const mcde::Sample queries = mcde::load_csv(a.common.input);
  emit(a.common.out, mcde::eval_report_to_json(persisted, queries));
  return kOk;
}

struct ScoreArgs {
  Common common;
  FitFlags flags;
  bool whiten = true;
  std::vector<std::size_t> ks{20};
  std::string labels;
};

int run_score(const ScoreArgs& a) {
  require_file(a.common.input, "input file");
  if (!a.labels.empty()) require_file(a.labels, "labels file");
  mcde::DetectOptions options;
  options.fit = resolve_fit_config(a.flags);
  options.whiten = a.whiten;

  const mcde::Sample x = mcde::load_csv(a.common.input);
  std::optional<std::vector<bool>> labels;
  if (!a.labels.empty()) labels = mcde::load_labels(a.labels, x.size());
  const auto reports = mcde::detect(x, a.ks, options, labels);
  for (const auto& r : reports) {
    if (r.degenerate > 0) {
      std::cerr << "warning: k = " << r.k << ": " << r.degenerate
                << " point(s) with zero density around them scored 1\n";
    }
  }
  emit(a.common.out, mcde::outlier_reports_to_json(reports));
  return kOk;
}

struct BenchArgs {
  std::string config;
  std::string out;
  std::string csv;
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
};

int run_bench_de(const BenchArgs& a) {
  mcde::DEExperimentConfig config;
  if (auto s = env_seed()) config.seed = *s;
  if (!a.config.empty()) {
    require_file(a.config, "config file");
    config = as_usage([&] { return mcde::de_config_from_json(mcde::read_file(a.config), config); });
  }
  if (a.seed) config.seed = *a.seed;
  const mcde::DEReport report = mcde::run_de_experiment(config);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    mcde::write_realizations_csv(report, csv);
    mcde::write_file(a.csv, csv.str());
  }
  emit(a.out, mcde::de_report_to_json(report));
  return kOk;
}

int run_bench_outlier(const BenchArgs& a) {
  mcde::OutlierExperimentConfig config;
  if (auto s = env_seed()) config.seed = *s;
  if (!a.config.empty()) {
    require_file(a.config, "config file");
    config = as_usage([&] { return mcde::outlier_config_from_json(mcde::read_file(a.config), config); });
  }
  if (a.seed) config.seed = *a.seed;
  emit(a.out, mcde::outlier_experiment_to_json(mcde::run_outlier_experiment(config)));
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain density estimation and local outlier scoring"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "select h* and write a fitted model as JSON");
  add_common(fit_cmd, fit.common, true);
  add_fit_flags(fit_cmd, fit.flags);
  fit_cmd->add_flag("--whiten,!--no-whiten", fit.whiten, "whiten before fitting (default on)");
  fit_cmd->add_option("--reflect", fit.reflect, "mirror the 1-D sample about this lower boundary");
  fit_cmd->add_option("--transform", fit.transform, "log|logit variable transform (1-D)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a fitted model at query points");
  add_common(eval_cmd, eval.common, true);
  eval_cmd->add_option("--model", eval.model, "model JSON written by fit")->required();

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "anomaly scores S_k for every input point");
  add_common(score_cmd, score.common, true);
  add_fit_flags(score_cmd, score.flags);
  score_cmd->add_flag("--whiten,!--no-whiten", score.whiten, "whiten before scoring (default on)");
  score_cmd->add_option("--k", score.ks, "neighbour count(s), comma separated")->delimiter(',');
  score_cmd->add_option("--labels", score.labels, "0/1 label per line; 1 marks an outlier");

  BenchArgs de;
  auto* de_cmd = app.add_subcommand("bench-de", "density estimation experiment (EMSE vs KDE)");
  de_cmd->add_option("--config", de.config, "experiment JSON");
  de_cmd->add_option("--out", de.out, "report JSON (default: stdout)");
  de_cmd->add_option("--csv", de.csv, "per-realization EMSE CSV");
  de_cmd->add_option("--threads", de.threads, "worker thread cap (0 = all cores)");
  de_cmd->add_option("--seed", de.seed, "base seed");

  BenchArgs outl;
  auto* out_cmd = app.add_subcommand("bench-outlier", "AUC versus k on synthetic datasets");
  out_cmd->add_option("--config", outl.config, "experiment JSON");
  out_cmd->add_option("--out", outl.out, "report JSON (default: stdout)");
  out_cmd->add_option("--threads", outl.threads, "worker thread cap (0 = all cores)");
  out_cmd->add_option("--seed", outl.seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (fit_cmd->parsed()) {
      mcde::set_max_threads(fit.common.threads);
      return run_fit(fit);
    }
    if (eval_cmd->parsed()) {
      mcde::set_max_threads(eval.common.threads);
      return run_eval(eval);
    }
    if (score_cmd->parsed()) {
      mcde::set_max_threads(score.common.threads);
      return run_score(score);
    }
    if (de_cmd->parsed()) {
      mcde::set_max_threads(de.threads);
      return run_bench_de(de);
    }
    mcde::set_max_threads(outl.threads);
    return run_bench_outlier(outl);
  } catch (const UsageError& e) {
    std::cerr << "mcde: " << e.what() << '\n';
    return kUsageError;
  } catch (const mcde::Error& e) {
    std::cerr << "mcde: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "mcde: unexpected failure: " << e.what() << '\n';
    return kRuntimeError;
  }
}
