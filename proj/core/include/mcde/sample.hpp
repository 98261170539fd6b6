#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcde {

enum class Provenance { raw, whitened };

//! N observations in D dimensions, stored row-major.
class Sample {
public:
  Sample() = default;
  Sample(std::size_t n, std::size_t d, Provenance provenance = Provenance::raw);
  Sample(std::size_t n, std::size_t d, std::vector<double> values,
         Provenance provenance = Provenance::raw);

  //! Builds a 1-D sample from scalar observations.
  static Sample from_scalars(std::span<const double> xs);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }
  Provenance provenance() const noexcept { return provenance_; }
  void set_provenance(Provenance p) noexcept { provenance_ = p; }

  std::span<const double> point(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  std::span<double> point(std::size_t i) { return {values_.data() + i * d_, d_}; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * d_ + j]; }

  const std::vector<double>& values() const noexcept { return values_; }

  //! Points selected by index, in the given order.
  Sample subset(std::span<const std::size_t> indices) const;

  bool operator==(const Sample&) const = default;

private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  Provenance provenance_ = Provenance::raw;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

} // namespace mcde
