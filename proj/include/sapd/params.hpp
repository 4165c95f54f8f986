#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace sapd {

/// Curvature data of a strongly-convex-strongly-concave saddle problem:
/// moduli mu_x, mu_y and Lipschitz constants of the partial gradients.
/// L_xx is the full smoothness constant of f(., y), regularizer included,
/// and L_yy likewise for f(x, .); L_yx bounds the cross coupling.
struct CurvatureProfile {
  double mu_x = 1.0;
  double mu_y = 1.0;
  double L_xx = 1.0;
  double L_yx = 0.0;
  double L_yy = 1.0;

  double kappa_x() const { return L_xx / mu_x; }
  double kappa_y() const { return L_yy / mu_y; }
  double kappa_yx() const { return L_yx / std::sqrt(mu_x * mu_y); }

  /// A profile with L_xx < mu_x is representable (callers may have looser
  /// constants) but suspicious; surfaced as a flag, not an error.
  bool smoothness_consistent() const { return L_xx >= mu_x; }

  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(mu_x) || bad(mu_y) || bad(L_xx) || bad(L_yx) || bad(L_yy))
      throw std::invalid_argument("CurvatureProfile: non-finite entry");
    if (mu_x <= 0.0 || mu_y <= 0.0)
      throw std::invalid_argument("CurvatureProfile: moduli must be positive");
    if (L_xx < 0.0 || L_yx < 0.0 || L_yy < 0.0)
      throw std::invalid_argument("CurvatureProfile: negative constant");
  }
};

struct ThetaThresholds {
  double theta_hat_1 = 0.0;  // primal/coupling threshold
  double theta_hat_2 = 0.0;  // dual smoothness threshold

  double theta_hat() const { return std::max(theta_hat_1, theta_hat_2); }
};

/// Smallest admissible momentum for the step-size rule.
///
/// theta_hat_1 = 1 / (1 + (kappa_x + 4 kappa_yx^2)^-1).
/// theta_hat_2 is the positive root of t^2 + t (1 + 8 k^2) - 8 k^2 = 0 with
/// k = kappa_y, evaluated in the rationalized form
/// 2 / (sqrt((1+c)^2 + 4c) + 1 + c), c = 1/(8 k^2), which loses no digits for
/// large k.  kappa_y = 0 takes the continuous limit theta_hat_2 = 0.
inline ThetaThresholds theta_thresholds(const CurvatureProfile& p) {
  p.validate();
  ThetaThresholds t;
  double s = p.kappa_x() + 4.0 * p.kappa_yx() * p.kappa_yx();
  t.theta_hat_1 = s > 0.0 ? s / (1.0 + s) : 0.0;
  double k = p.kappa_y();
  if (k > 0.0) {
    double c = 1.0 / (8.0 * k * k);
    if (std::isfinite(c)) {
      t.theta_hat_2 =
          2.0 / (std::sqrt((1.0 + c) * (1.0 + c) + 4.0 * c) + 1.0 + c);
    }
  }
  return t;
}

/// Momentum and step sizes tied by the one-parameter rule
/// tau = (1-theta)/(mu_x theta), sigma = (1-theta)/(mu_y theta),
/// alpha = (1-theta)/(2 sigma).
struct SapdParams {
  double theta = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double theta_hat_1 = 0.0;
  double theta_hat_2 = 0.0;

  /// False flags a theta below the guaranteed range; the recursion still
  /// runs (callers may be exploring), only the certificate is void.
  bool meets_thresholds() const {
    return theta >= std::max(theta_hat_1, theta_hat_2);
  }
};

inline SapdParams params_from_theta(const CurvatureProfile& p, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("params_from_theta: theta must be in (0,1)");
  ThetaThresholds t = theta_thresholds(p);
  SapdParams s;
  s.theta = theta;
  s.tau = (1.0 - theta) / (p.mu_x * theta);
  s.sigma = (1.0 - theta) / (p.mu_y * theta);
  s.alpha = (1.0 - theta) / (2.0 * s.sigma);
  s.theta_hat_1 = t.theta_hat_1;
  s.theta_hat_2 = t.theta_hat_2;
  return s;
}

/// Outcome of the admissibility certificate for (tau, sigma, theta, alpha).
struct CertificateReport {
  bool scalar_ok = false;
  double scalar_slack = 0.0;  // min(tau mu_x, sigma mu_y) - (1-theta)/theta
  double min_eig_full = 0.0;
  double min_eig_g1 = 0.0;
  double min_eig_g2 = 0.0;
  bool pass = false;

  nlohmann::json to_json() const {
    return {{"scalar_ok", scalar_ok},       {"scalar_slack", scalar_slack},
            {"min_eig_full", min_eig_full}, {"min_eig_g1", min_eig_g1},
            {"min_eig_g2", min_eig_g2},     {"pass", pass}};
  }
};

/// Checks the two-part certificate: the scalar step condition
/// min(tau mu_x, sigma mu_y) >= (1-theta)/theta, and positive
/// semidefiniteness of
///   [ 1/tau - L_xx        0         -L_yx ]
///   [      0        1/sigma - alpha -L_yy ]
///   [  -L_yx            -L_yy     alpha/theta ]
/// reported alongside the split G1 + G2 (each with corner alpha/(2 theta))
/// whose separate nonnegativity is what the threshold formulas guarantee.
/// Failures are reported, not thrown; non-finite matrix entries throw.
inline CertificateReport check_admissibility(const CurvatureProfile& p,
                                             const SapdParams& s,
                                             double eig_tol = 1e-10) {
  p.validate();
  double a = 1.0 / s.tau - p.L_xx;
  double b = 1.0 / s.sigma - s.alpha;
  double corner = s.alpha / s.theta;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(corner))
    throw std::invalid_argument("check_admissibility: non-finite matrix entry");

  Eigen::Matrix3d full;
  full << a, 0.0, -p.L_yx, 0.0, b, -p.L_yy, -p.L_yx, -p.L_yy, corner;
  Eigen::Matrix3d g1 = Eigen::Matrix3d::Zero();
  g1(0, 0) = a;
  g1(0, 2) = g1(2, 0) = -p.L_yx;
  g1(2, 2) = 0.5 * corner;
  Eigen::Matrix3d g2 = Eigen::Matrix3d::Zero();
  g2(1, 1) = b;
  g2(1, 2) = g2(2, 1) = -p.L_yy;
  g2(2, 2) = 0.5 * corner;

  auto min_eig = [](const Eigen::Matrix3d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };

  CertificateReport r;
  r.scalar_slack =
      std::min(s.tau * p.mu_x, s.sigma * p.mu_y) - (1.0 - s.theta) / s.theta;
  r.scalar_ok = r.scalar_slack >= -eig_tol;
  r.min_eig_full = min_eig(full);
  r.min_eig_g1 = min_eig(g1);
  r.min_eig_g2 = min_eig(g2);
  r.pass = r.scalar_ok && r.min_eig_full >= -eig_tol;
  return r;
}

/// Constants entering the transient bound and the drift inequality.
struct BoundConstants {
  /// Xi_theta = ((1-theta)/theta) (2/mu_x + (4/mu_y)((1+theta)^2 + theta^2));
  /// the stationary term of the weighted-distance bound.
  double xi_tilde = 0.0;
  /// Geometric mixing factor zeta = theta/(1 - alpha sigma); equals
  /// 2 theta/(1+theta) under the rule.
  double zeta = 0.0;
  /// K = theta (tau + 2 sigma ((1+theta)^2 + theta^2)) delta2; stored per
  /// unit delta2 since the noise level is the caller's.
  double drift_k_unit = 0.0;

  double drift_k(double delta_sq) const { return drift_k_unit * delta_sq; }
};

inline BoundConstants bound_constants(const CurvatureProfile& p,
                                      const SapdParams& s) {
  BoundConstants b;
  double th = s.theta;
  double poly = (1.0 + th) * (1.0 + th) + th * th;
  b.xi_tilde = ((1.0 - th) / th) * (2.0 / p.mu_x + (4.0 / p.mu_y) * poly);
  b.zeta = th / (1.0 - s.alpha * s.sigma);
  b.drift_k_unit = th * (s.tau + 2.0 * s.sigma * poly);
  return b;
}

/// Right side of the iterate bound at step k:
/// theta^k Delta0 + (1 - theta^k) Xi_theta delta2, where
/// Delta0 = mu_x |x0-x*|^2 + mu_y |y0-y*|^2 is the caller's initial gap.
inline double lyapunov_bound(const SapdParams& s, const BoundConstants& b,
                             long long k, double delta0, double delta_sq) {
  double decay = std::pow(s.theta, static_cast<double>(k));
  return decay * delta0 + (1.0 - decay) * b.xi_tilde * delta_sq;
}

/// Burn-in long enough to shrink the mixing factor below drop (default 1e-6).
inline long long burn_in_for(double zeta, double drop = 1e-6) {
  if (!(zeta > 0.0 && zeta < 1.0)) return 0;
  return static_cast<long long>(std::ceil(std::log(drop) / std::log(zeta)));
}

}  // namespace sapd
