#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acpm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad identifiers, unparsable expressions, invalid configs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ValidationError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation outside the domain of a function, a chart, or a curve interval.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric hypothesis of an operation does not hold at the requested point.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// ∇_T T vanishes (below the curvature threshold): the Frenet frame is undefined.
class GeodesicError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// A frame cannot be built: null principal normal, δ ≈ 0, degenerate seeds.
class DegenerateError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotLegendreError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

}  // namespace acpm
