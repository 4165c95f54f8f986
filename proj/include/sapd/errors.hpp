#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace sapd {

/// Malformed configuration input (unknown key, bad value, missing file).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine hit its cap before reaching tolerance.  The last
/// iterate travels with the exception so callers can inspect or salvage it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_x,
                   Eigen::VectorXd last_y)
      : std::runtime_error(what),
        last_x(std::move(last_x)),
        last_y(std::move(last_y)) {}

  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}

  Eigen::VectorXd last_x;
  Eigen::VectorXd last_y;
};

}  // namespace sapd
