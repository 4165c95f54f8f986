#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "sapd/errors.hpp"
#include "sapd/params.hpp"
#include "sapd/problem.hpp"
#include "sapd/solvers.hpp"

namespace sapd {

struct ReferenceOptions {
  double theta_floor = 0.9;  // run at max(theta_hat, theta_floor)
  double tol_rel = 1e-4;     // unconstrained: relative f-change stop
  double residual_tol = 1e-6;  // constrained: projected-gradient residual
  std::int64_t max_iters = 1000000;
  int newton_steps = 5;
  Eigen::VectorXd x0, y0;  // empty: zeros, projected if constrained
};

struct ReferencePoint {
  Eigen::VectorXd x, y;
  std::int64_t iters = 0;
  double residual = 0.0;  // |grad f| unconstrained, PG residual otherwise
};

namespace detail {

inline double pg_residual(const SaddleProblem& p, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, const Eigen::VectorXd& gx,
                          const Eigen::VectorXd& gy) {
  Eigen::VectorXd tx = x - gx;
  Eigen::VectorXd ty = y + gy;
  project_x(p, tx);
  project_y(p, ty);
  return (x - tx).norm() + (y - ty).norm();
}

}  // namespace detail

/// Saddle point by the noiseless accelerated recursion at the rule's own
/// parameters, theta = max(theta_hat, theta_floor).  Unconstrained problems
/// stop on stalled objective and finish with damped Newton on the full
/// gradient (when a Hessian is available); constrained problems run until
/// the projected-gradient residual reaches residual_tol.  Hitting the
/// iteration cap throws with the last iterate attached.
inline ReferencePoint reference_solution(const SaddleProblem& p,
                                         const ReferenceOptions& opt = {}) {
  const CurvatureProfile& prof = p.profile();
  double theta =
      std::max(theta_thresholds(prof).theta_hat(), opt.theta_floor);
  SapdParams params = params_from_theta(prof, theta);

  Eigen::VectorXd x0 = opt.x0.size() ? opt.x0
                                     : Eigen::VectorXd::Zero(p.dim_x());
  Eigen::VectorXd y0 = opt.y0.size() ? opt.y0
                                     : Eigen::VectorXd::Zero(p.dim_y());
  detail::project_x(p, x0);
  detail::project_y(p, y0);
  IterateState st = IterateState::init(x0, y0);
  RngStream unused(0);  // the noiseless path never touches it

  const bool constrained = p.constraint_x() || p.constraint_y();
  Eigen::VectorXd gx(p.dim_x()), gy(p.dim_y());
  double f_prev = p.value(st.x, st.y);
  bool stopped = false;

  for (std::int64_t it = 0; it < opt.max_iters; ++it) {
    sapd_step(p, params, st, unused, false);
    if (constrained) {
      p.grad_x(st.x, st.y, gx);
      p.grad_y(st.x, st.y, gy);
      double res = detail::pg_residual(p, st.x, st.y, gx, gy);
      if (res <= opt.residual_tol)
        return {st.x, st.y, st.k, res};
    } else {
      double f = p.value(st.x, st.y);
      bool stalled =
          std::abs(f - f_prev) <= opt.tol_rel * std::max(1.0, std::abs(f_prev));
      f_prev = f;
      if (stalled && it >= 10) {
        stopped = true;
        break;
      }
    }
  }

  if (!stopped)
    throw ConvergenceError("reference_solution: stop rule not reached within "
                           "the iteration cap",
                           st.x, st.y);

  // Newton polish on grad f = 0; quadratic local convergence wipes out the
  // slack the coarse f-change stop leaves behind.
  Eigen::VectorXd z(p.dim_x() + p.dim_y());
  z << st.x, st.y;
  auto grad_at = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& g) {
    Eigen::VectorXd xx = zz.head(p.dim_x());
    Eigen::VectorXd yy = zz.tail(p.dim_y());
    p.grad_x(xx, yy, gx);
    p.grad_y(xx, yy, gy);
    g.resize(zz.size());
    g << gx, gy;
  };
  Eigen::VectorXd g, g_try, dz, z_try;
  grad_at(z, g);
  if (p.has_hessian()) {
    Eigen::MatrixXd H;
    for (int it = 0; it < opt.newton_steps && g.norm() > 1e-14; ++it) {
      Eigen::VectorXd xx = z.head(p.dim_x());
      Eigen::VectorXd yy = z.tail(p.dim_y());
      p.hessian(xx, yy, H);
      dz = H.fullPivLu().solve(-g);
      double t = 1.0;
      for (int half = 0; half < 40; ++half) {
        z_try = z + t * dz;
        grad_at(z_try, g_try);
        if (g_try.norm() <= (1.0 - 1e-4 * t) * g.norm()) break;
        t *= 0.5;
      }
      z = z + t * dz;
      grad_at(z, g);
    }
  }
  return {z.head(p.dim_x()), z.tail(p.dim_y()), st.k, g.norm()};
}

}  // namespace sapd
