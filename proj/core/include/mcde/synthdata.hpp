#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcde/rng.hpp"
#include "mcde/sample.hpp"

namespace mcde {

enum class DistributionFamily { normal, chi_squared, exponential, gamma, log_laplace, mixture };

//! A 1-D distribution; D-dimensional targets are products of D independent copies.
//! Parameters: normal (mean, variance), chi_squared (df), exponential (rate),
//! gamma (shape; scale 1), log_laplace (location, scale of log x), mixture (components).
struct DistributionSpec {
  DistributionFamily family = DistributionFamily::normal;
  double p1 = 0.0;
  double p2 = 1.0;
  std::vector<DistributionSpec> components;  // mixture only
  std::vector<double> weights;               // mixture only, sums to 1

  static DistributionSpec normal(double mean, double variance);
  static DistributionSpec chi_squared(double df);
  static DistributionSpec exponential(double rate);
  static DistributionSpec gamma(double shape);
  static DistributionSpec log_laplace(double location, double scale);
  //! Equal weights unless given.
  static DistributionSpec mixture(std::vector<DistributionSpec> components,
                                  std::vector<double> weights = {});

  //! Throws InvalidParams on out-of-range parameters.
  void validate() const;
  bool operator==(const DistributionSpec&) const = default;
};

//! Parses "normal:4,0.5", "chisq:5", "exp:1", "gamma:12", "loglaplace:2,1",
//! "mix:normal:0,2+normal:8,3" (equal weights).
DistributionSpec parse_distribution(std::string_view text);
std::string to_string(const DistributionSpec& spec);

double pdf_1d(const DistributionSpec& spec, double x);
double mean_1d(const DistributionSpec& spec);
double variance_1d(const DistributionSpec& spec);
double draw_1d(const DistributionSpec& spec, CounterRng& rng);

//! Product density prod_k f(x_k); 0 outside the support.
double pdf_eval(const DistributionSpec& spec, std::span<const double> x);

//! n points with d i.i.d. coordinates each. Point i uses its own stream, so the
//! sample is a pure function of (spec, d, seed, i).
Sample sample_product(const DistributionSpec& spec, std::size_t n, std::size_t d,
                      std::uint64_t seed);

struct LabeledSample {
  Sample points;
  std::vector<bool> labels;  // true = outlier
  DistributionSpec inlier;
  DistributionSpec outlier;
  std::uint64_t seed = 0;

  std::size_t outlier_count() const;
};

//! n_in inlier and n_out outlier draws in d dimensions, order shuffled by seed.
LabeledSample sample_mixture(const DistributionSpec& fin, const DistributionSpec& fout,
                             std::size_t n_in, std::size_t n_out, std::size_t d,
                             std::uint64_t seed);

struct OutlierDatasetSpec {
  std::string name;
  DistributionSpec inlier;
  DistributionSpec outlier;
  std::size_t n_in = 0;
  std::size_t n_out = 0;

  double inlier_fraction() const {
    return static_cast<double>(n_in) / static_cast<double>(n_in + n_out);
  }
};

//! Synthetic outlier benchmarks: 1 = N(4,0.5) vs LogLaplace(2,1), 450/50;
//! 2 = Exp(1) vs N(5,1), 180/20; 3 = Gamma(2) vs Gamma(12), 950/50.
OutlierDatasetSpec outlier_dataset(int id);

} // namespace mcde
