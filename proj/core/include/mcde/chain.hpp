#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcde/kernels.hpp"
#include "mcde/sample.hpp"

namespace mcde {

enum class Metric { euclidean };

//! Dense, row-major N x N matrix. Memory is O(N^2).
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * n_ + c]; }
  std::span<const double> row(std::size_t r) const { return {entries_.data() + r * n_, n_}; }
  std::span<double> row(std::size_t r) { return {entries_.data() + r * n_, n_}; }
  const std::vector<double>& entries() const noexcept { return entries_; }

private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

//! Pairwise distances d_mn between sample points.
struct DistanceMatrix {
  SquareMatrix d;
  std::size_t dim = 0;  // dimensionality of the points the distances came from

  std::size_t size() const noexcept { return d.size(); }
};

//! W_mn = K(d_mn / h) (1 - b delta_mn).
struct WeightMatrix {
  SquareMatrix w;
  double h = 0.0;
  double b = 0.0;
  Kernel kernel;
  std::size_t dim = 0;

  std::size_t size() const noexcept { return w.size(); }
};

//! Row-stochastic Q_mn = W_mn / sum_k W_mk.
struct TransitionMatrix {
  SquareMatrix q;

  std::size_t size() const noexcept { return q.size(); }
};

struct StationaryVector {
  std::vector<double> pi;

  std::size_t size() const noexcept { return pi.size(); }
};

DistanceMatrix distance_matrix(const Sample& sample, Metric metric = Metric::euclidean);

void check_bandwidth(double h);
void check_bias(double b);

WeightMatrix weight_matrix(const DistanceMatrix& d, const Kernel& kernel, double h, double b);

//! Row sums of W without materializing it: sum_n K(d_mn / h) (1 - b delta_mn).
//! The kernel is the radial kernel of dimension d.dim, without the 1/h^D factor.
std::vector<double> weight_row_sums(const DistanceMatrix& d, const Kernel& kernel, double h,
                                    double b);

TransitionMatrix transition_matrix(const WeightMatrix& w);

//! Closed form pi_m = sum_n W_mn / sum_mn W_mn; exact left eigenvector of Q.
StationaryVector stationary_distribution(const WeightMatrix& w);

//! Infinity norm of pi Q - pi.
double stationarity_residual(const StationaryVector& pi, const TransitionMatrix& q);

} // namespace mcde
