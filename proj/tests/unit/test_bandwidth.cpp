#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "mcde/bandwidth.hpp"
#include "mcde/error.hpp"
#include "mcde/fit.hpp"
#include "oracles.hpp"

using namespace mcde;

namespace {

Sample pts(std::initializer_list<double> xs) {
  const std::vector<double> v(xs);
  return Sample::from_scalars(v);
}

long double explicit_loo(const Sample& s, const Kernel& k, double h) {
  const std::size_t n = s.size();
  const long double hd = std::pow(static_cast<long double>(h), static_cast<long double>(s.dim()));
  long double loss = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) acc += k.eval(euclidean_distance(s.point(i), s.point(j)) / h, s.dim());
    }
    loss -= std::log(acc / (static_cast<long double>(n) * hd));
  }
  return loss;
}

std::size_t sign_changes(const LossCurve& c) {
  std::size_t changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const double diff = c.points[i].loss - c.points[i - 1].loss;
    const int sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
    if (sign != 0 && last != 0 && sign != last) ++changes;
    if (sign != 0) last = sign;
  }
  return changes;
}

} // namespace

TEST(BandwidthGrid, DefaultSpansScaledRange) {
  const BandwidthGrid g(GridSpec{}, 100);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g[0], 0.1);
  EXPECT_DOUBLE_EQ(g[19], 10.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_GT(g[i], g[i - 1]);
    EXPECT_NEAR(std::log(g[i]) - std::log(g[i - 1]), std::log(100.0) / 19.0, 1e-12);
  }
}

TEST(BandwidthGrid, LinearAndUnscaled) {
  GridSpec spec;
  spec.min_raw = 1.0;
  spec.max_raw = 3.0;
  spec.count = 5;
  spec.log_spaced = false;
  spec.n_scaling = false;
  const BandwidthGrid g(spec, 1000);
  EXPECT_EQ(g.values(), (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));
  spec.count = 1;
  EXPECT_EQ(BandwidthGrid(spec, 7).values(), std::vector<double>{1.0});
}

TEST(BandwidthGrid, Errors) {
  GridSpec bad;
  bad.min_raw = 0.0;
  EXPECT_THROW(BandwidthGrid(bad, 10), Error);
  bad = GridSpec{};
  bad.count = 0;
  EXPECT_THROW(BandwidthGrid(bad, 10), Error);
  bad = GridSpec{};
  bad.max_raw = 0.5;
  EXPECT_THROW(BandwidthGrid(bad, 10), Error);
  EXPECT_THROW(BandwidthGrid(std::vector<double>{1.0, 1.0}), Error);
  EXPECT_THROW(BandwidthGrid(std::vector<double>{-1.0, 1.0}), Error);
}

TEST(LossNll, UniformDensityExamples) {
  const Sample s = pts({0.1, 0.25, 0.4, 0.45});
  const DensityFn unit = [](std::span<const double> x) { return x[0] >= 0.0 && x[0] <= 1.0 ? 1.0 : 0.0; };
  EXPECT_EQ(loss_nll(unit, s), 0.0);
  const DensityFn half = [](std::span<const double> x) { return x[0] >= 0.0 && x[0] <= 0.5 ? 2.0 : 0.0; };
  EXPECT_NEAR(loss_nll(unit, s) - loss_nll(half, s), 4.0 * std::numbers::ln2, 1e-14);
}

TEST(LossNll, ZeroDensityFails) {
  const std::vector<double> v{0.5, 0.0};
  try {
    loss_nll(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDensityAtSamplePoint);
  }
}

TEST(LossLoo, TwoPointMinimizerIsDistance) {
  for (double d : {0.5, 1.0, 3.0}) {
    const Sample s = pts({0.0, d});
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) grid.push_back(0.05 * d * std::pow(100.0, i / 199.0));
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (loss_loo(s, Kernel(), grid[i]) < loss_loo(s, Kernel(), grid[best])) best = i;
    }
    EXPECT_LE(std::abs(std::log(grid[best] / d)), std::log(100.0) / 199.0) << d;
  }
}

TEST(LossLoo, ClosedFormTwoPoint) {
  // -2 log(phi(d/h) / (2h)).
  const double d = 1.3, h = 0.7;
  const double expected = -2.0 * std::log(oracle::normal_pdf(d / h) / (2.0 * h));
  EXPECT_NEAR(loss_loo(pts({0.0, d}), Kernel(), h), expected, 1e-13);
}

TEST(LossLoo, TranslationInvariant) {
  const Sample s = oracle::normal_sample(60, 3, 1);
  Sample t = s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t(i, 0) += 8.0;
    t(i, 1) -= 3.0;
    t(i, 2) += 0.5;
  }
  for (double h : {0.2, 0.8, 2.0}) {
    const double a = loss_loo(s, Kernel(), h);
    EXPECT_NEAR(loss_loo(t, Kernel(), h), a, 1e-12 * std::abs(a));
  }
}

TEST(LossLoo, SubtractionFormMatchesExplicitSum) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto inst = oracle::random_chain_instance(seed, 80);
    const double sub = loss_loo(inst.sample, inst.kernel, inst.h);
    const long double ref = explicit_loo(inst.sample, inst.kernel, inst.h);
    EXPECT_NEAR(sub, static_cast<double>(ref), 1e-10 * std::max(1.0L, std::fabs(ref))) << seed;
  }
}

TEST(LossLoo, EqualsNllOfUnnormalizedUnitBiasEstimate) {
  const Sample s = oracle::normal_sample(120, 2, 2);
  for (double h : {0.3, 1.0}) {
    const PointwiseEstimate p = pointwise_estimate(s, Kernel(), h, 1.0);
    const double a = loss_loo(s, Kernel(), h);
    EXPECT_NEAR(loss_nll(p.values), a, 1e-12 * std::abs(a));
  }
}

TEST(LossKdeInSample, DecreasesAsBandwidthShrinks) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Sample s = oracle::normal_sample(200, 1, seed);
    const DistanceMatrix d = distance_matrix(s);
    EXPECT_LT(loss_kde_in_sample(d, Kernel(), 1e-4), loss_kde_in_sample(d, Kernel(), 1e-3));
    EXPECT_LT(loss_kde_in_sample(d, Kernel(), 1e-3), loss_kde_in_sample(d, Kernel(), 1e-2));
  }
}

TEST(KdeKfoldCv, SingleGridValue) {
  const Sample s = oracle::normal_sample(50, 1, 3);
  EXPECT_EQ(kde_kfold_cv(s, Kernel(), BandwidthGrid(std::vector<double>{0.37}), 5, 1), 0.37);
}

TEST(KdeKfoldCv, DeterministicGivenSeed) {
  const Sample s = oracle::normal_sample(300, 2, 4);
  const BandwidthGrid g(GridSpec{}, s.size());
  LossCurve a, b;
  EXPECT_EQ(kde_kfold_cv(s, Kernel(), g, 5, 11, &a), kde_kfold_cv(s, Kernel(), g, 5, 11, &b));
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].loss, b.points[i].loss);
}

TEST(KdeKfoldCv, NearSilvermanOnNormalData) {
  const Sample s = oracle::normal_sample(1000, 1, 5);
  double mean = 0.0, var = 0.0;
  for (double x : s.values()) mean += x / 1000.0;
  for (double x : s.values()) var += (x - mean) * (x - mean) / 999.0;
  const double silverman = 1.06 * std::sqrt(var) * std::pow(1000.0, -0.2);
  EXPECT_NEAR(1.06 * std::pow(1000.0, -0.2), 0.267, 1e-3);
  const double h = kde_kfold_cv(s, Kernel(), BandwidthGrid(GridSpec{}, s.size()), 5, 42);
  EXPECT_LT(std::abs(std::log(h / silverman)), std::log(2.0)) << h;
}

TEST(KdeKfoldCv, TooFewPoints) {
  const BandwidthGrid g(std::vector<double>{1.0});
  EXPECT_THROW(kde_kfold_cv(pts({0.0, 1.0, 2.0}), Kernel(), g, 5, 1), Error);
  EXPECT_THROW(kde_kfold_cv(pts({0.0, 1.0, 2.0}), Kernel(), g, 1, 1), Error);
}

TEST(Optimize, LooTwoPointsPicksNearestGridValue) {
  const double d = 2.0;
  FitConfig cfg;
  cfg.optimizer = Optimizer::loo;
  cfg.grid = GridSpec{0.5, 8.0, 9, true, false};
  const OptimizeResult r = optimize(pts({1.0, 1.0 + d}), cfg);
  EXPECT_DOUBLE_EQ(r.h_star, 2.0);
}

TEST(Optimize, NllInteriorMinimumOnNormalData) {
  const Sample s = oracle::normal_sample(500, 1, 6);
  const OptimizeResult r = optimize(s, FitConfig{});
  EXPECT_GT(r.grid_index, 0u);
  EXPECT_LT(r.grid_index, r.curve.points.size() - 1);
  ASSERT_TRUE(r.model.has_value());
  EXPECT_EQ(r.model->h_star, r.h_star);
}

TEST(Optimize, NllCurvesAreUnimodal) {
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Sample s = oracle::normal_sample(500, 3, 700 + seed);
    const OptimizeResult r = optimize(s, FitConfig{});
    if (sign_changes(r.curve) > 1) ++violations;
  }
  EXPECT_LE(violations, 1);
}

TEST(Optimize, NllAndLooAgreeOnLargeSample) {
  const Sample s = oracle::normal_sample(2000, 3, 7);
  FitConfig cfg;
  const double h_nll = optimize(s, cfg).h_star;
  cfg.optimizer = Optimizer::loo;
  const double h_loo = optimize(s, cfg).h_star;
  EXPECT_LT(std::abs(std::log(h_nll / h_loo)), std::log(2.0)) << h_nll << " " << h_loo;
}

TEST(Optimize, FailedGridPointsAreExcluded) {
  // Epanechnikov kernel: tiny bandwidths leave every point isolated and fail.
  FitConfig cfg;
  cfg.model.kernel = Kernel(KernelFamily::epanechnikov);
  cfg.grid = GridSpec{0.01, 10.0, 10, true, false};
  const OptimizeResult r = optimize(pts({0.0, 1.0, 2.5, 4.0}), cfg);
  ASSERT_TRUE(r.curve.points.front().failed);
  EXPECT_FALSE(r.curve.points.front().failure.empty());
  EXPECT_FALSE(r.curve.points[r.grid_index].failed);
  for (const auto& p : r.curve.points) {
    if (!p.failed) {
      EXPECT_GE(p.loss, r.curve.points[r.grid_index].loss);
    }
  }
}

TEST(Optimize, AllGridPointsFailed) {
  FitConfig cfg;
  cfg.model.kernel = Kernel(KernelFamily::uniform);
  cfg.grid = GridSpec{0.01, 0.1, 3, true, false};
  try {
    optimize(pts({0.0, 1.0, 2.0}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllGridPointsFailed);
  }
}

TEST(LossCurve, TiesGoToSmallerBandwidth) {
  LossCurve c;
  c.points = {{0.1, 3.0, false, {}}, {0.2, 1.0, false, {}}, {0.3, 1.0, false, {}},
              {0.4, 0.5, true, "x"}};
  c.select();
  EXPECT_EQ(c.argmin, 1u);
}

TEST(Optimize, KdeCvDispatch) {
  const Sample s = oracle::normal_sample(200, 1, 8);
  FitConfig cfg;
  cfg.optimizer = Optimizer::kde_cv;
  cfg.seed = 9;
  const OptimizeResult r = optimize(s, cfg);
  EXPECT_EQ(r.h_star, kde_kfold_cv(s, Kernel(), BandwidthGrid(cfg.grid, s.size()), 5, 9));
  EXPECT_FALSE(r.model.has_value());
}

TEST(Names, RoundTrip) {
  for (auto o : {Optimizer::nll, Optimizer::loo, Optimizer::kde_cv}) EXPECT_EQ(parse_optimizer(to_string(o)), o);
  for (auto v : {Variant::f1, Variant::f2}) EXPECT_EQ(parse_variant(to_string(v)), v);
  for (auto c : {InterpolationChoice::automatic, InterpolationChoice::linear, InterpolationChoice::nearest}) {
    EXPECT_EQ(parse_interpolation(to_string(c)), c);
  }
  EXPECT_THROW(parse_optimizer("bogus"), Error);
}
