#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcde {

enum class ErrorCode {
  EmptySample,
  InvalidBandwidth,
  InvalidBias,
  ZeroRow,
  DimensionMismatch,
  DegenerateDomain,
  AllGridPointsFailed,
  SingularCovariance,
  PointBelowBoundary,
  DomainViolation,
  ZeroDensityAtSamplePoint,
  TooFewPoints,
  KOutOfRange,
  DegenerateLabels,
  InvalidParams,
  ParseError,
};

std::string_view to_string(ErrorCode code);

//! Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

//! CSV/JSON ingestion failure with a 1-based source position.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

} // namespace mcde
