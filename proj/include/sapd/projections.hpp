#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sapd/errors.hpp"

namespace sapd {

/// Euclidean projection onto { ||x||^2 <= radius_sq }: radial scaling.
inline Eigen::VectorXd project_ball(const Eigen::VectorXd& x,
                                    double radius_sq) {
  if (!(radius_sq >= 0.0))
    throw std::invalid_argument("project_ball: negative squared radius");
  double n2 = x.squaredNorm();
  if (n2 <= radius_sq) return x;
  return x * std::sqrt(radius_sq / n2);
}

/// Same ball shifted to an arbitrary center.
inline Eigen::VectorXd project_ball(const Eigen::VectorXd& x, double radius_sq,
                                    const Eigen::VectorXd& center) {
  return center + project_ball(x - center, radius_sq);
}

/// Euclidean projection onto the probability simplex by sort and threshold.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw std::invalid_argument("project_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = u[0] - 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    css += u[j];
    double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;  // largest feasible support wins
  }
  return (v.array() - tau).max(0.0).matrix();
}

/// The chi-squared style uncertainty set
///   P = { y >= 0, sum y = 1, ||y - 1/n||^2 <= r/n^2 },
/// the probability simplex cut with a ball around the uniform law.
struct UncertaintySet {
  int n = 0;
  double r = 0.0;
  double tol = 1e-10;
  int max_sweeps = 10000;

  double radius() const { return std::sqrt(r) / static_cast<double>(n); }
  double radius_sq() const {
    return r / (static_cast<double>(n) * static_cast<double>(n));
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("UncertaintySet: n must be >= 1");
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("UncertaintySet: r must be positive");
  }

  bool contains(const Eigen::VectorXd& y, double slack) const {
    if (y.size() != n) return false;
    if (y.minCoeff() < -slack) return false;
    if (std::abs(y.sum() - 1.0) > slack) return false;
    Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 1.0 / n);
    return (y - c).norm() <= std::sqrt(radius_sq()) + slack;
  }
};

/// Projection onto the uncertainty set by Dykstra's alternating scheme
/// between the simplex and the centered ball.  The center 1/n lies in both
/// sets, so the intersection is never empty and the scheme converges to the
/// exact projection.  Returns the simplex-side iterate: simplex membership
/// is exact, ball membership holds within the fixed-point residual.
inline Eigen::VectorXd project_uncertainty(const Eigen::VectorXd& v,
                                           const UncertaintySet& set) {
  set.validate();
  if (v.size() != set.n)
    throw std::invalid_argument("project_uncertainty: dimension mismatch");
  const Eigen::VectorXd center = Eigen::VectorXd::Constant(set.n, 1.0 / set.n);
  const double r2 = set.radius_sq();

  Eigen::VectorXd x = v;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(set.n);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(set.n);
  Eigen::VectorXd y(set.n);
  for (int sweep = 0; sweep < set.max_sweeps; ++sweep) {
    y = project_simplex(x + p);
    p = x + p - y;
    Eigen::VectorXd xn = project_ball(y + q, r2, center);
    q = y + q - xn;
    double resid = (y - xn).norm();
    x = xn;
    if (resid <= set.tol) return y;
  }
  throw ConvergenceError("project_uncertainty: Dykstra hit the sweep cap", v,
                         x);
}

/// Feasible-set handle attached to a problem side.  project mutates in
/// place; contains answers membership within slack.
struct Constraint {
  virtual ~Constraint() = default;
  virtual void project(Eigen::VectorXd& v) const = 0;
  virtual bool contains(const Eigen::VectorXd& v, double slack) const = 0;
};

class BallConstraint final : public Constraint {
 public:
  explicit BallConstraint(double radius_sq) : radius_sq_(radius_sq) {
    if (!(radius_sq > 0.0))
      throw std::invalid_argument("BallConstraint: radius_sq must be > 0");
  }

  void project(Eigen::VectorXd& v) const override {
    double n2 = v.squaredNorm();
    if (n2 > radius_sq_) v *= std::sqrt(radius_sq_ / n2);
  }

  bool contains(const Eigen::VectorXd& v, double slack) const override {
    return v.norm() <= std::sqrt(radius_sq_) + slack;
  }

  double radius_sq() const { return radius_sq_; }

 private:
  double radius_sq_;
};

class UncertaintyConstraint final : public Constraint {
 public:
  explicit UncertaintyConstraint(UncertaintySet set) : set_(set) {
    set_.validate();
  }

  void project(Eigen::VectorXd& v) const override {
    v = project_uncertainty(v, set_);
  }

  bool contains(const Eigen::VectorXd& v, double slack) const override {
    return set_.contains(v, slack);
  }

  const UncertaintySet& set() const { return set_; }

 private:
  UncertaintySet set_;
};

}  // namespace sapd
