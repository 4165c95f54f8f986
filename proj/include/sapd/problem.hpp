#pragma once

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sapd/linalg.hpp"
#include "sapd/params.hpp"
#include "sapd/projections.hpp"
#include "sapd/rng.hpp"

namespace sapd {

/// E ||N(0, I_m)||^p = 2^(p/2) Gamma((m+p)/2) / Gamma(m/2); its p-th root
/// converts a per-coordinate noise level into the moment bounds delta_(p).
inline double gaussian_norm_moment_root(int m, int p) {
  double lg = 0.5 * p * std::log(2.0) + std::lgamma(0.5 * (m + p)) -
              std::lgamma(0.5 * m);
  return std::exp(lg / p);
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

inline double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

/// A strongly-convex-strongly-concave saddle problem
///   min_x max_y f(x, y)
/// exposing exact partial gradients, a stochastic oracle, curvature data,
/// and optional constraint sets per side.  Implementations must be safe to
/// share across threads: every const call is re-entrant and scratch-free.
class SaddleProblem {
 public:
  virtual ~SaddleProblem() = default;

  virtual const char* name() const = 0;
  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;
  virtual double value(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y) const = 0;
  virtual void grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& out) const = 0;
  virtual void grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& out) const = 0;

  /// One fresh unbiased draw; each call consumes its own randomness.
  virtual void sample_grad_x(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, RngStream& rng,
                             Eigen::VectorXd& out) const = 0;
  virtual void sample_grad_y(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, RngStream& rng,
                             Eigen::VectorXd& out) const = 0;

  virtual const CurvatureProfile& profile() const = 0;

  virtual const Constraint* constraint_x() const { return nullptr; }
  virtual const Constraint* constraint_y() const { return nullptr; }

  /// Exact saddle point when one is analytically available.
  virtual std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>
  known_saddle() const {
    return std::nullopt;
  }

  /// delta_(p) with E||noise||^p <= delta_(p)^p for both oracle sides, when
  /// the noise law admits a closed form.
  virtual std::optional<double> noise_bound(int) const { return std::nullopt; }

  virtual bool has_hessian() const { return false; }

  /// Full symmetric Hessian of f on the stacked (x, y) variable.
  virtual void hessian(const Eigen::VectorXd&, const Eigen::VectorXd&,
                       Eigen::MatrixXd&) const {
    throw std::logic_error("hessian: not provided by this problem");
  }
};

/// Draws one stochastic gradient pair, primal first.
inline void sample_gradients(const SaddleProblem& p, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, RngStream& rng,
                             Eigen::VectorXd& gx, Eigen::VectorXd& gy) {
  p.sample_grad_x(x, y, rng, gx);
  p.sample_grad_y(x, y, rng, gy);
}

/// f(x, y) = (mu_x/2)|x|^2 + y'Cx - (mu_y/2)|y|^2 with additive Gaussian
/// oracle noise of per-coordinate level noise_sigma.  Saddle at the origin.
class QuadraticSaddle final : public SaddleProblem {
 public:
  QuadraticSaddle(double mu_x, double mu_y, Eigen::MatrixXd C,
                  double noise_sigma = 0.0)
      : mu_x_(mu_x), mu_y_(mu_y), C_(std::move(C)), sigma_(noise_sigma) {
    if (C_.size() == 0)
      throw std::invalid_argument("QuadraticSaddle: empty coupling matrix");
    if (sigma_ < 0.0)
      throw std::invalid_argument("QuadraticSaddle: negative noise level");
    scalar_ = C_.rows() == 1 && C_.cols() == 1;
    profile_.mu_x = mu_x_;
    profile_.mu_y = mu_y_;
    profile_.L_xx = mu_x_;
    profile_.L_yy = mu_y_;
    profile_.L_yx = scalar_ ? std::abs(C_(0, 0)) : spectral_norm(C_);
    profile_.validate();
  }

  const char* name() const override { return "quadratic"; }
  int dim_x() const override { return static_cast<int>(C_.cols()); }
  int dim_y() const override { return static_cast<int>(C_.rows()); }

  double value(const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) const override {
    return 0.5 * mu_x_ * x.squaredNorm() + y.dot(C_ * x) -
           0.5 * mu_y_ * y.squaredNorm();
  }

  void grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    if (scalar_) {
      out[0] = mu_x_ * x[0] + C_(0, 0) * y[0];
      return;
    }
    out = mu_x_ * x;
    out.noalias() += C_.transpose() * y;
  }

  void grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    if (scalar_) {
      out[0] = C_(0, 0) * x[0] - mu_y_ * y[0];
      return;
    }
    out = -mu_y_ * y;
    out.noalias() += C_ * x;
  }

  void sample_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    grad_x(x, y, out);
    add_noise(rng, out);
  }

  void sample_grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    grad_y(x, y, out);
    add_noise(rng, out);
  }

  const CurvatureProfile& profile() const override { return profile_; }

  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> known_saddle()
      const override {
    return std::make_pair(Eigen::VectorXd::Zero(dim_x()),
                          Eigen::VectorXd::Zero(dim_y()));
  }

  std::optional<double> noise_bound(int p) const override {
    int m = std::max(dim_x(), dim_y());
    return sigma_ * gaussian_norm_moment_root(m, p);
  }

  bool has_hessian() const override { return true; }

  void hessian(const Eigen::VectorXd&, const Eigen::VectorXd&,
               Eigen::MatrixXd& H) const override {
    int dx = dim_x();
    int dy = dim_y();
    H.setZero(dx + dy, dx + dy);
    H.topLeftCorner(dx, dx).diagonal().setConstant(mu_x_);
    H.bottomRightCorner(dy, dy).diagonal().setConstant(-mu_y_);
    H.bottomLeftCorner(dy, dx) = C_;
    H.topRightCorner(dx, dy) = C_.transpose();
  }

  double noise_sigma() const { return sigma_; }

 private:
  void add_noise(RngStream& rng, Eigen::VectorXd& v) const {
    if (sigma_ == 0.0) return;
    if (v.size() == 1) {
      v[0] += sigma_ * rng.gaussian();
      return;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += sigma_ * rng.gaussian();
  }

  double mu_x_, mu_y_;
  Eigen::MatrixXd C_;
  double sigma_;
  bool scalar_;
  CurvatureProfile profile_;
};

/// Scalar test problem with a genuinely non-quadratic primal term:
///   f(x, y) = (mu_x/2) x^2 + log(1 + e^x) + c x y - (mu_y/2) y^2.
/// The softplus contributes bounded higher derivatives at the saddle, which
/// is what bias measurements need.  Saddle solved at construction by Newton
/// on the reduced equation (mu_x + c^2/mu_y) x + sigmoid(x) = 0.
class LogisticPerturbedSaddle final : public SaddleProblem {
 public:
  LogisticPerturbedSaddle(double mu_x = 1.0, double c = 1.0, double mu_y = 1.0,
                          double noise_sigma = 0.0)
      : mu_x_(mu_x), c_(c), mu_y_(mu_y), sigma_(noise_sigma) {
    if (sigma_ < 0.0)
      throw std::invalid_argument(
          "LogisticPerturbedSaddle: negative noise level");
    profile_.mu_x = mu_x_;
    profile_.mu_y = mu_y_;
    profile_.L_xx = mu_x_ + 0.25;
    profile_.L_yy = mu_y_;
    profile_.L_yx = std::abs(c_);
    profile_.validate();

    double slope = mu_x_ + c_ * c_ / mu_y_;
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
      double h = slope * x + sigmoid(x);
      if (std::abs(h) <= 1e-15) break;
      double s = sigmoid(x);
      x -= h / (slope + s * (1.0 - s));
    }
    x_star_ = x;
    y_star_ = c_ * x / mu_y_;
  }

  const char* name() const override { return "logistic_perturbed"; }
  int dim_x() const override { return 1; }
  int dim_y() const override { return 1; }

  double value(const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) const override {
    return 0.5 * mu_x_ * x[0] * x[0] + softplus(x[0]) + c_ * x[0] * y[0] -
           0.5 * mu_y_ * y[0] * y[0];
  }

  void grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    out[0] = mu_x_ * x[0] + sigmoid(x[0]) + c_ * y[0];
  }

  void grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    out[0] = c_ * x[0] - mu_y_ * y[0];
  }

  void sample_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    grad_x(x, y, out);
    if (sigma_ != 0.0) out[0] += sigma_ * rng.gaussian();
  }

  void sample_grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    grad_y(x, y, out);
    if (sigma_ != 0.0) out[0] += sigma_ * rng.gaussian();
  }

  const CurvatureProfile& profile() const override { return profile_; }

  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> known_saddle()
      const override {
    Eigen::VectorXd xs(1), ys(1);
    xs[0] = x_star_;
    ys[0] = y_star_;
    return std::make_pair(xs, ys);
  }

  std::optional<double> noise_bound(int p) const override {
    return sigma_ * gaussian_norm_moment_root(1, p);
  }

  bool has_hessian() const override { return true; }

  void hessian(const Eigen::VectorXd& x, const Eigen::VectorXd&,
               Eigen::MatrixXd& H) const override {
    double s = sigmoid(x[0]);
    H.setZero(2, 2);
    H(0, 0) = mu_x_ + s * (1.0 - s);
    H(0, 1) = H(1, 0) = c_;
    H(1, 1) = -mu_y_;
  }

 private:
  double mu_x_, c_, mu_y_, sigma_;
  double x_star_ = 0.0, y_star_ = 0.0;
  CurvatureProfile profile_;
};

}  // namespace sapd
