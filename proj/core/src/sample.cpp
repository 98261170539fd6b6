#include "mcde/sample.hpp"

#include <cmath>
#include <string>

#include "mcde/error.hpp"

namespace mcde {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidBandwidth: return "InvalidBandwidth";
    case ErrorCode::InvalidBias: return "InvalidBias";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::AllGridPointsFailed: return "AllGridPointsFailed";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::PointBelowBoundary: return "PointBelowBoundary";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::ZeroDensityAtSamplePoint: return "ZeroDensityAtSamplePoint";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Sample::Sample(std::size_t n, std::size_t d, Provenance provenance)
    : n_(n), d_(d), values_(n * d, 0.0), provenance_(provenance) {}

Sample::Sample(std::size_t n, std::size_t d, std::vector<double> values, Provenance provenance)
    : n_(n), d_(d), values_(std::move(values)), provenance_(provenance) {
  if (values_.size() != n * d) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(n * d) + " values, got " +
                    std::to_string(values_.size()));
  }
}

Sample Sample::from_scalars(std::span<const double> xs) {
  return Sample(xs.size(), 1, std::vector<double>(xs.begin(), xs.end()));
}

Sample Sample::subset(std::span<const std::size_t> indices) const {
  Sample out(indices.size(), d_, provenance_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = point(indices[r]);
    auto dst = out.point(r);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

} // namespace mcde
