#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace hjperf {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2 = Vec2<double>;
using IVec2 = Eigen::Vector2i;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base of every error raised by the library. `where()` names the module and
/// operation that raised it so the CLI can print something useful.
class Error : public std::runtime_error {
 public:
  Error(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Invalid input or configuration (bad parameter, unresolved geometry).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: no admissible discrete path, no anchor, no convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class Unreachable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoAnchor : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hjperf
