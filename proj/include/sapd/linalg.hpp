#pragma once

#include <Eigen/Core>
#include <cmath>

#include "sapd/errors.hpp"

namespace sapd {

/// Largest singular value of A by power iteration on the Gram operator
/// v -> A^T (A v).  Deterministic all-ones start; stops when the singular
/// value estimate is stable to a relative tol.  If the current direction is
/// annihilated by A the iteration restarts from canonical basis vectors, so
/// a zero return means A really is the zero matrix.
inline double spectral_norm(const Eigen::MatrixXd& A, double tol = 1e-8,
                            int max_iters = 10000) {
  if (A.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols());
  v /= v.norm();
  double s_prev = 0.0;
  Eigen::Index restart = 0;
  Eigen::VectorXd Av(A.rows());
  for (int it = 0; it < max_iters; ++it) {
    Av.noalias() = A * v;
    double s = Av.norm();
    if (s == 0.0) {
      if (restart == A.cols()) return 0.0;
      v.setZero();
      v[restart++] = 1.0;
      s_prev = 0.0;
      continue;
    }
    v.noalias() = A.transpose() * Av;
    v /= v.norm();
    if (std::abs(s - s_prev) <= tol * s) return s;
    s_prev = s;
  }
  throw ConvergenceError("spectral_norm: power iteration did not stabilize");
}

}  // namespace sapd
