// Acceptance suite: one PASS/FAIL line per criterion, each under its runtime budget.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "instances.hpp"
#include "mcde/bandwidth.hpp"
#include "mcde/bench.hpp"
#include "mcde/chain.hpp"
#include "mcde/estimator.hpp"
#include "mcde/fit.hpp"
#include "mcde/io.hpp"
#include "mcde/outlier.hpp"
#include "mcde/synthdata.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mcde;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome stationarity_oracle() {
  double worst_residual = 0.0, worst_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_chain_instance(1000 + seed, 200);
    const WeightMatrix w = weight_matrix(distance_matrix(inst.sample), inst.kernel, inst.h, inst.b);
    const StationaryVector pi = stationary_distribution(w);
    const TransitionMatrix q = transition_matrix(w);
    worst_residual = std::max(worst_residual, stationarity_residual(pi, q));
    const auto ref = oracle::power_iteration(q.q.entries(), q.size());
    for (std::size_t i = 0; i < pi.size(); ++i) worst_gap = std::max(worst_gap, std::abs(pi.pi[i] - ref[i]));
  }
  return {worst_residual < 1e-10 && worst_gap < 1e-8,
          fmt("max |piQ - pi| = %.2e, max |pi - power iteration| = %.2e", worst_residual, worst_gap)};
}

// ---------------------------------------------------------------- 2

Outcome kde_recovery() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::random_chain_instance(2000 + seed, 200);
    const StationaryVector pi =
        stationary_distribution(weight_matrix(distance_matrix(inst.sample), inst.kernel, inst.h, 0.0));
    std::vector<double> kde(inst.sample.size());
    double total = 0.0;
    for (std::size_t i = 0; i < kde.size(); ++i) {
      kde[i] = kde_evaluate(inst.sample, inst.kernel, inst.h, inst.sample.point(i));
      total += kde[i];
    }
    for (std::size_t i = 0; i < kde.size(); ++i) worst = std::max(worst, std::abs(pi.pi[i] - kde[i] / total));
  }
  return {worst < 1e-12, fmt("max deviation %.2e over 50 instances", worst)};
}

// ---------------------------------------------------------------- 3

Outcome loo_recovery() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::random_chain_instance(3000 + seed, 200);
    const Sample& s = inst.sample;
    const std::size_t n = s.size();
    const double hd = std::pow(inst.h, static_cast<double>(s.dim()));
    const PointwiseEstimate p = pointwise_estimate(s, inst.kernel, inst.h, 1.0);
    long double loss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      long double acc = 0.0L;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) acc += inst.kernel.eval(euclidean_distance(s.point(i), s.point(j)) / inst.h, s.dim());
      }
      const long double loo = acc / (static_cast<long double>(n) * hd);
      worst = std::max(worst, static_cast<double>(std::fabs(p.raw[i] - loo) / std::max(1.0L, loo)));
      loss -= std::log(loo);
    }
    const double l = loss_loo(s, inst.kernel, inst.h);
    worst = std::max(worst, static_cast<double>(std::fabs(l - loss) / std::max(1.0L, std::fabs(loss))));
  }
  return {worst < 1e-10, fmt("max relative deviation %.2e (pointwise and loss) over 50 instances", worst)};
}

// ---------------------------------------------------------------- 4

Outcome two_point_oracle() {
  std::string detail;
  bool ok = true;
  for (double d : {0.5, 1.0, 3.0}) {
    const std::vector<double> xs{0.0, d};
    const Sample s = Sample::from_scalars(xs);
    std::vector<double> grid(200);
    for (int i = 0; i < 200; ++i) grid[i] = 0.1 * d + (10.0 * d - 0.1 * d) * i / 199.0;
    std::size_t best = 0;
    double best_loss = loss_loo(s, Kernel(), grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double l = loss_loo(s, Kernel(), grid[i]);
      if (l < best_loss) {
        best_loss = l;
        best = i;
      }
    }
    const double step = grid[1] - grid[0];
    ok = ok && std::abs(grid[best] - d) <= step;
    detail += fmt("d=%g: h*=%.4f (step %.4f); ", d, grid[best], step);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 5

Outcome loss_sanity() {
  int pathology = 0, interior = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Sample s = oracle::normal_sample(500, 1, 5000 + seed);
    const DistanceMatrix d = distance_matrix(s);
    if (loss_kde_in_sample(d, Kernel(), 1e-4) < loss_kde_in_sample(d, Kernel(), 1e-3)) ++pathology;
    const OptimizeResult r = optimize(s, d, FitConfig{});
    if (r.grid_index > 0 && r.grid_index + 1 < r.curve.points.size()) ++interior;
  }
  return {pathology == 8 && interior >= 7,
          fmt("KDE NLL falls as h -> 0 on %d/8 seeds; f2 NLL argmin interior on %d/8 seeds", pathology, interior)};
}

// ---------------------------------------------------------------- 6

Outcome normalization() {
  const Sample s2 = oracle::normal_sample(1000, 2, 6000);
  const DensityModel m = fit_mcde(s2, FitConfig{});
  const McEstimate re =
      mc_normalize([&](std::span<const double> x) { return m.density(x); }, m.domain, 400000, 6001);
  const double rel = m.integral_std_error / m.integral;
  const double se = std::sqrt(re.std_error * re.std_error + rel * rel);
  const bool reintegrates = std::abs(re.integral - 1.0) < 4.0 * se;

  double dev_small = 0.0, dev_large = 0.0, worst_large = 0.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const double c100 = fit_mcde(oracle::normal_sample(100, 1, 6100 + seed), FitConfig{}).normalization_constant;
    const double c2000 = fit_mcde(oracle::normal_sample(2000, 1, 6200 + seed), FitConfig{}).normalization_constant;
    dev_small += std::abs(c100 - 1.0) / 8.0;
    dev_large += std::abs(c2000 - 1.0) / 8.0;
    worst_large = std::max(worst_large, std::abs(c2000 - 1.0));
  }
  return {reintegrates && worst_large < 0.1 && dev_large <= dev_small,
          fmt("re-integral %.4f +- %.4f (4 se); max |C2-1| at N=2000: %.4f; mean |C2-1|: N=100 %.4f, N=2000 %.4f",
              re.integral, 4.0 * se, worst_large, dev_small, dev_large)};
}

// ---------------------------------------------------------------- 7

bool decreasing_trend(const DEReport& r, std::string& detail) {
  int inversions = 0;
  bool within_bars = true;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const DECell& c = r.cells[i];
    if (c.failure) {
      detail += "failure: " + *c.failure + "; ";
      return false;
    }
    detail += fmt("N=%zu %.3f+-%.3f ", c.n, *c.scaled_emse_mcde, c.scaled_half_width_mcde.value_or(0.0));
    if (i == 0) continue;
    const DECell& p = r.cells[i - 1];
    if (*c.scaled_emse_mcde >= *p.scaled_emse_mcde) {
      ++inversions;
      const double bars = c.scaled_half_width_mcde.value_or(0.0) + p.scaled_half_width_mcde.value_or(0.0);
      within_bars = within_bars && (*c.scaled_emse_mcde - *p.scaled_emse_mcde) <= bars;
    }
  }
  detail += fmt("(ratio KDE/MCDE at largest N: %.2f); ", r.cells.back().performance_ratio);
  return inversions <= 1 && within_bars;
}

Outcome consistency_trend() {
  DEExperimentConfig c;
  c.dims = {3};
  c.sizes = {100, 500, 2000};
  c.realizations = 8;
  std::string detail = "chi2(5): ";
  const bool chi = decreasing_trend(run_de_experiment(c), detail);
  c.spec = DistributionSpec::mixture({DistributionSpec::normal(0.0, 2.0), DistributionSpec::normal(8.0, 3.0)});
  detail += "mixture: ";
  const bool mix = decreasing_trend(run_de_experiment(c), detail);
  return {chi && mix, detail};
}

// ---------------------------------------------------------------- 8

Outcome auc_oracle() {
  std::mt19937_64 eng(8);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + eng() % 49;
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(eng() % 6);
      labels[i] = eng() % 4 == 0;
    }
    labels[0] = true;
    labels[1] = false;
    if (auc(scores, labels) == oracle::brute_force_auc(scores, labels)) ++agree;
  }
  return {agree == 200, fmt("%d/200 instances agree exactly", agree)};
}

// ---------------------------------------------------------------- 9

Outcome outlier_locality() {
  OutlierExperimentConfig c1;
  c1.datasets = {outlier_dataset(1)};
  c1.dims = {4};
  c1.ks = {10, 75};
  const auto r1 = run_outlier_experiment(c1);
  const double auc10 = r1.cells[0].mean_auc, auc75 = r1.cells[1].mean_auc;

  OutlierExperimentConfig c2;
  c2.datasets = {outlier_dataset(2)};
  c2.dims = {2, 6};
  c2.ks = {40};
  const auto r2 = run_outlier_experiment(c2);
  const double d2 = r2.cells[0].mean_auc, d6 = r2.cells[1].mean_auc;
  return {auc75 > 0.85 && auc75 > auc10 && d6 >= d2 - 0.05,
          fmt("dataset1 D=4: AUC k=75 %.4f, k=10 %.4f; dataset2 k=40: D=2 %.4f, D=6 %.4f", auc75, auc10, d2, d6)};
}

// ---------------------------------------------------------------- 10, 11

struct Workspace {
  fs::path dir;
  Workspace() : dir(fs::temp_directory_path() / "mcde_acceptance") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MCDE_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_labeled(const Workspace& ws, const LabeledSample& ls, const std::string& x, const std::string& y) {
  std::string pts, labels;
  for (std::size_t i = 0; i < ls.points.size(); ++i) {
    for (std::size_t k = 0; k < ls.points.dim(); ++k) pts += (k ? "," : "") + format_double(ls.points(i, k));
    pts += "\n";
    labels += ls.labels[i] ? "1\n" : "0\n";
  }
  write_file(ws(x), pts);
  write_file(ws(y), labels);
}

Outcome determinism() {
  Workspace ws;
  const auto spec = outlier_dataset(2);
  write_labeled(ws, sample_mixture(spec.inlier, spec.outlier, spec.n_in, spec.n_out, 3, 10), "x.csv", "y.csv");
  write_file(ws("de.json"), R"({"dims": [2], "sizes": [80, 160], "realizations": 3})");
  write_file(ws("out.json"), R"({"datasets": [2], "dims": [2, 4], "ks": [10, 40], "realizations": 3})");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fit", "fit --input " + ws("x.csv") + " --seed 7 --out "},
      {"fit-f1", "fit --input " + ws("x.csv") + " --variant f1 --seed 7 --out "},
      {"score", "score --input " + ws("x.csv") + " --labels " + ws("y.csv") + " --k 5,20,40 --seed 7 --out "},
      {"bench-de", "bench-de --config " + ws("de.json") + " --seed 7 --out "},
      {"bench-outlier", "bench-outlier --config " + ws("out.json") + " --seed 7 --out "},
  };
  std::string detail;
  bool ok = true;
  for (const auto& [name, cmd] : commands) {
    const std::string a = ws(name + "_a.json"), b = ws(name + "_b.json");
    const std::string s1 = ws(name + "_t1.json"), s4 = ws(name + "_t4.json");
    const bool ran = run_cli(cmd + a) == 0 && run_cli(cmd + b) == 0 && run_cli(cmd + s1 + " --threads 1") == 0 &&
                     run_cli(cmd + s4 + " --threads 4") == 0;
    const bool same = ran && read_file(a) == read_file(b) && read_file(s1) == read_file(s4) &&
                      read_file(a) == read_file(s1);
    ok = ok && same;
    detail += name + (same ? " identical; " : " DIFFERS; ");
  }
  if (run_cli("fit --input " + ws("x.csv") + " --seed 7 --out " + ws("m.json")) == 0) {
    const std::string e = "eval --model " + ws("m.json") + " --input " + ws("x.csv") + " --out ";
    const bool same = run_cli(e + ws("e1.json") + " --threads 1") == 0 &&
                      run_cli(e + ws("e4.json") + " --threads 4") == 0 && read_file(ws("e1.json")) == read_file(ws("e4.json"));
    ok = ok && same;
    detail += std::string("eval") + (same ? " identical" : " DIFFERS");
  }
  return {ok, detail};
}

Outcome real_data_harness() {
  Workspace ws;
  std::string detail;
  // Harness check on a synthetic labeled CSV: the CLI emits AUC for k = 5, 10, 20.
  const auto spec = outlier_dataset(3);
  write_labeled(ws, sample_mixture(spec.inlier, spec.outlier, spec.n_in, spec.n_out, 2, 11), "x.csv", "y.csv");
  bool ok = run_cli("score --input " + ws("x.csv") + " --labels " + ws("y.csv") + " --k 5,10,20 --out " +
                    ws("r.json")) == 0;
  if (ok) {
    const auto j = nlohmann::json::parse(read_file(ws("r.json")));
    ok = j["reports"].size() == 3;
    for (const auto& r : j["reports"]) {
      ok = ok && r.contains("auc");
      if (r.contains("auc")) detail += fmt("k=%d AUC %.4f; ", r["k"].get<int>(), r["auc"].get<double>());
    }
  }
  // Optional real data: <name>.csv with <name>.labels in MCDE_REAL_DATA_DIR.
  const char* dir = std::getenv("MCDE_REAL_DATA_DIR");
  if (dir == nullptr) {
    detail += "real datasets not supplied (set MCDE_REAL_DATA_DIR)";
    return {ok, detail};
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    fs::path labels = entry.path();
    labels.replace_extension(".labels");
    if (!fs::exists(labels)) continue;
    const std::string out = ws(entry.path().stem().string() + ".json");
    if (run_cli("score --input " + entry.path().string() + " --labels " + labels.string() + " --k 5,10,20 --out " +
                out) != 0) {
      detail += entry.path().stem().string() + ": score failed; ";
      ok = false;
      continue;
    }
    const auto j = nlohmann::json::parse(read_file(out));
    detail += entry.path().stem().string() + ":";
    for (const auto& r : j["reports"]) detail += fmt(" k=%d %.4f", r["k"].get<int>(), r["auc"].get<double>());
    detail += "; ";
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

} // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number; none runs all of them.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria = {
      {1, "stationarity oracle", 30.0, stationarity_oracle},
      {2, "KDE recovery at b=0", 10.0, kde_recovery},
      {3, "leave-one-out recovery at b=1", 10.0, loo_recovery},
      {4, "two-point bandwidth oracle", 5.0, two_point_oracle},
      {5, "loss sanity", 120.0, loss_sanity},
      {6, "normalization", 180.0, normalization},
      {7, "consistency trend", 600.0, consistency_trend},
      {8, "AUC oracle", 5.0, auc_oracle},
      {9, "outlier locality", 300.0, outlier_locality},
      {10, "determinism", 120.0, determinism},
      {11, "real-dataset harness", 120.0, real_data_harness},
  };
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_s;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s [%.1fs / %.0fs] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
