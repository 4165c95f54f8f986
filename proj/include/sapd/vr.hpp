#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "sapd/params.hpp"
#include "sapd/problem.hpp"
#include "sapd/rng.hpp"
#include "sapd/solvers.hpp"

namespace sapd {

/// Two-point Richardson combination.  The default weights (2, -1) pair
/// theta2 = 2 theta1 - 1, cancelling the order-(1-theta) bias term.
inline Eigen::VectorXd extrapolate(const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double w1 = 2.0,
                                   double w2 = -1.0) {
  return w1 * a + w2 * b;
}

/// Mean of a tail of a vector sequence; indices before burn_in are seen but
/// not accumulated.
class RunningAverage {
 public:
  explicit RunningAverage(std::int64_t burn_in = 0) : burn_in_(burn_in) {}

  void add(const Eigen::VectorXd& v) {
    if (seen_++ < burn_in_) return;
    if (count_ == 0)
      sum_ = v;
    else
      sum_ += v;
    ++count_;
  }

  bool ready() const { return count_ > 0; }
  std::int64_t count() const { return count_; }

  Eigen::VectorXd mean() const {
    if (count_ == 0)
      throw std::logic_error("RunningAverage: no samples accumulated");
    return sum_ / static_cast<double>(count_);
  }

 private:
  std::int64_t burn_in_ = 0;
  std::int64_t seen_ = 0;
  std::int64_t count_ = 0;
  Eigen::VectorXd sum_;
};

/// Paired-chain variance-reduction setup.  theta2 < 0 selects the standard
/// pairing 2 theta1 - 1.  Averaged mode extrapolates the running iterate
/// averages instead of the raw iterates.  couple_noise drives both chains
/// with one shared noise stream (common random numbers).
struct ExtrapolationSpec {
  double theta1 = 0.0;
  double theta2 = -1.0;
  enum class Mode { Raw, Averaged };
  Mode mode = Mode::Raw;
  bool couple_noise = false;
  std::int64_t average_burn_in = 0;

  double resolved_theta2() const {
    return theta2 < 0.0 ? 2.0 * theta1 - 1.0 : theta2;
  }

  /// Weights solving w1 + w2 = 1, w1 (1-t1) + w2 (1-t2) = 0.
  std::pair<double, double> weights() const {
    double t2 = resolved_theta2();
    double w1 = (1.0 - t2) / (theta1 - t2);
    return {w1, 1.0 - w1};
  }

  void validate() const {
    double t2 = resolved_theta2();
    if (!(theta1 > 0.0 && theta1 < 1.0))
      throw std::invalid_argument("ExtrapolationSpec: theta1 must be in (0,1)");
    if (!(t2 > 0.0 && t2 < 1.0))
      throw std::invalid_argument(
          "ExtrapolationSpec: theta2 out of (0,1); the default pairing needs "
          "theta1 > 1/2");
    if (t2 == theta1)
      throw std::invalid_argument("ExtrapolationSpec: thetas must differ");
  }
};

using VrRecorder = std::function<void(
    std::int64_t, const Eigen::VectorXd&, const Eigen::VectorXd&,
    const IterateState&, const IterateState&)>;

/// Runs the two SAPD chains in lockstep from a common start and records the
/// extrapolated sequence.  Cost per iteration is exactly two oracle pairs.
/// Each chain owns the stream it is handed; with couple_noise the second
/// stream is replaced by a copy of the first, so both chains see identical
/// draws (the per-step draw pattern of the two chains is identical).
inline TrajectoryRecord run_vr_sapd(const SaddleProblem& p,
                                    const ExtrapolationSpec& vr,
                                    const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& y0,
                                    std::int64_t num_iters, RngStream rng1,
                                    RngStream rng2,
                                    const RecordSpec& record = {},
                                    const VrRecorder& rec = {}) {
  vr.validate();
  const CurvatureProfile& prof = p.profile();
  SapdParams p1 = params_from_theta(prof, vr.theta1);
  SapdParams p2 = params_from_theta(prof, vr.resolved_theta2());
  auto [w1, w2] = vr.weights();
  if (vr.couple_noise) rng2 = rng1;

  IterateState s1 = IterateState::init(x0, y0);
  IterateState s2 = IterateState::init(x0, y0);
  const bool averaged = vr.mode == ExtrapolationSpec::Mode::Averaged;
  RunningAverage ax1(vr.average_burn_in), ay1(vr.average_burn_in);
  RunningAverage ax2(vr.average_burn_in), ay2(vr.average_burn_in);
  if (averaged) {
    ax1.add(x0), ay1.add(y0);  // iterate index 0 counts toward the average
    ax2.add(x0), ay2.add(y0);
  }

  TrajectoryRecord out;
  out.label = record.label.empty() ? "vr_sapd" : record.label;
  out.seed = record.seed;
  out.stride = record.stride;
  bool with_eds = record.x_star.size() > 0;

  Eigen::VectorXd zx, zy;
  for (std::int64_t i = 0; i < num_iters; ++i) {
    sapd_step(p, p1, s1, rng1, true);
    sapd_step(p, p2, s2, rng2, true);
    if (averaged) {
      ax1.add(s1.x), ay1.add(s1.y);
      ax2.add(s2.x), ay2.add(s2.y);
    }
    if (averaged && ax1.ready()) {
      zx = w1 * ax1.mean() + w2 * ax2.mean();
      zy = w1 * ay1.mean() + w2 * ay2.mean();
    } else {
      zx = w1 * s1.x + w2 * s2.x;
      zy = w1 * s1.y + w2 * s2.y;
    }
    if (rec) rec(s1.k, zx, zy, s1, s2);
    if (s1.k % record.stride == 0 || i + 1 == num_iters) {
      out.ks.push_back(s1.k);
      if (with_eds) {
        double d2 = (zx - record.x_star).squaredNorm() +
                    (zy - record.y_star).squaredNorm();
        out.rel_eds.push_back(d2 / record.denom);
      }
      if (record.dump_iterates) {
        out.xs.push_back(zx);
        out.ys.push_back(zy);
      }
    }
  }
  return out;
}

}  // namespace sapd
