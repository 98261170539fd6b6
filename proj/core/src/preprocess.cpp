#include "mcde/preprocess.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcde/error.hpp"

namespace mcde {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> to_vector(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    }
  }
  return out;
}

std::vector<double> mat_vec(const std::vector<double>& m, std::span<const double> v) {
  const std::size_t d = v.size();
  std::vector<double> out(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += m[r * d + c] * v[c];
    out[r] = s;
  }
  return out;
}

void require_1d(const Sample& sample, const char* what) {
  if (sample.dim() != 1) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " is defined for 1-D samples only, got D = " +
                    std::to_string(sample.dim()));
  }
}

} // namespace

std::vector<double> WhiteningTransform::apply(std::span<const double> x) const {
  std::vector<double> centered(x.begin(), x.end());
  for (std::size_t k = 0; k < centered.size(); ++k) centered[k] -= mean[k];
  return mat_vec(transform, centered);
}

std::vector<double> WhiteningTransform::invert(std::span<const double> y) const {
  auto x = mat_vec(inverse, y);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += mean[k];
  return x;
}

Sample WhiteningTransform::apply(const Sample& sample) const {
  if (sample.dim() != dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "whitening transform has D = " + std::to_string(dim()) + ", sample has D = " +
                    std::to_string(sample.dim()));
  }
  Sample out(sample.size(), sample.dim(), Provenance::whitened);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto y = apply(sample.point(i));
    std::copy(y.begin(), y.end(), out.point(i).begin());
  }
  return out;
}

double WhiteningTransform::whitened_density(double raw_density) const {
  return raw_density * std::exp(-log_abs_det);
}

double WhiteningTransform::raw_density(double whitened_density) const {
  return whitened_density * std::exp(log_abs_det);
}

std::pair<Sample, WhiteningTransform> whiten(const Sample& sample) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n <= d || n < 2) {
    throw Error(ErrorCode::SingularCovariance, "whitening needs N > D, got N = " +
                                                   std::to_string(n) + ", D = " +
                                                   std::to_string(d));
  }

  Eigen::Map<const RowMatrix> x(sample.values().data(), static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(d));
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  const RowMatrix centered = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "covariance eigendecomposition failed");
  }
  // Descending eigenvalues; each eigenvector's largest-magnitude component positive.
  Eigen::VectorXd values = solver.eigenvalues().reverse();
  Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }

  const double largest = values(0);
  const double smallest = values(values.size() - 1);
  if (!(largest > 0.0) || smallest < 1e-12 * largest) {
    throw Error(ErrorCode::SingularCovariance,
                "covariance is singular or nearly so (eigenvalues " + std::to_string(largest) +
                    " .. " + std::to_string(smallest) + "); data may be collinear");
  }

  const Eigen::VectorXd inv_sqrt = values.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd t = vectors * inv_sqrt.asDiagonal() * vectors.transpose();
  const Eigen::MatrixXd t_inv = vectors * values.cwiseSqrt().asDiagonal() * vectors.transpose();

  WhiteningTransform wt;
  wt.mean.assign(mean.data(), mean.data() + mean.size());
  wt.transform = to_vector(t);
  wt.inverse = to_vector(t_inv);
  wt.log_abs_det = -0.5 * values.array().log().sum();

  return {wt.apply(sample), std::move(wt)};
}

Sample reflect_boundary(const Sample& sample, double boundary, BoundarySide side) {
  (void)side;  // lower boundary only
  require_1d(sample, "boundary reflection");
  const std::size_t n = sample.size();
  std::vector<double> out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample(i, 0);
    if (x < boundary) {
      throw Error(ErrorCode::PointBelowBoundary, "point " + std::to_string(i) + " = " +
                                                     std::to_string(x) + " lies below boundary " +
                                                     std::to_string(boundary));
    }
    out[i] = x;
    out[n + i] = 2.0 * boundary - x;
  }
  return Sample(2 * n, 1, std::move(out), sample.provenance());
}

Sample transform_variable(const Sample& sample, VariableTransform kind) {
  require_1d(sample, "variable transform");
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double x = sample(i, 0);
    if (kind == VariableTransform::log) {
      if (!(x > 0.0)) {
        throw Error(ErrorCode::DomainViolation,
                    "log transform needs x > 0, point " + std::to_string(i) + " = " +
                        std::to_string(x));
      }
      out[i] = std::log(x);
    } else {
      if (!(x > 0.0 && x < 1.0)) {
        throw Error(ErrorCode::DomainViolation,
                    "logit transform needs 0 < x < 1, point " + std::to_string(i) + " = " +
                        std::to_string(x));
      }
      out[i] = std::log(x / (1.0 - x));
    }
  }
  return Sample(sample.size(), 1, std::move(out), sample.provenance());
}

Sample inverse_transform_variable(const Sample& sample, VariableTransform kind) {
  require_1d(sample, "variable transform");
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double y = sample(i, 0);
    out[i] = kind == VariableTransform::log ? std::exp(y) : 1.0 / (1.0 + std::exp(-y));
  }
  return Sample(sample.size(), 1, std::move(out), sample.provenance());
}

} // namespace mcde
