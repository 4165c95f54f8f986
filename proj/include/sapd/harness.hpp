#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sapd/params.hpp"
#include "sapd/problem.hpp"
#include "sapd/reference.hpp"
#include "sapd/rng.hpp"
#include "sapd/solvers.hpp"
#include "sapd/vr.hpp"

namespace sapd {

/// |z - z*|^2 / |z0 - z*|^2.  A start on top of the solution leaves nothing
/// to normalize by and is rejected.
inline double relative_eds(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& x_star,
                           const Eigen::VectorXd& y_star,
                           const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& y0) {
  double denom = (x0 - x_star).squaredNorm() + (y0 - y_star).squaredNorm();
  if (denom == 0.0)
    throw std::invalid_argument("relative_eds: z0 coincides with z*");
  return ((x - x_star).squaredNorm() + (y - y_star).squaredNorm()) / denom;
}

/// Work-stealing loop over [0, n).  Each item must write only its own slot;
/// under that discipline results do not depend on thread count or timing.
/// The first exception thrown by any item is rethrown on the caller.
template <typename F>
void parallel_for(std::int64_t n, int threads, F&& fn) {
  if (n <= 0) return;
  threads = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
  if (threads == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

/// One solver lane of an experiment.  vr is set exactly when the kind is
/// VrSapd; its chains take over from spec.params.
struct SolverEntry {
  std::string label;
  SolverSpec spec;
  std::optional<ExtrapolationSpec> vr;
};

struct ExperimentPlan {
  std::shared_ptr<const SaddleProblem> problem;
  std::vector<SolverEntry> solvers;
  std::int64_t num_paths = 50;
  std::int64_t num_iters = 1000;
  std::int64_t stride = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  Eigen::VectorXd x0, y0;  // empty: x0 = 2*ones, y0 = ones/dim_y
  std::optional<ReferencePoint> reference;  // else known saddle, else solved
  ReferenceOptions ref_options;
};

struct SolverCurve {
  std::string label;
  SolverKind kind = SolverKind::Sapd;
  std::vector<std::int64_t> ks;
  std::vector<double> mean_rel_eds;
  std::vector<double> std_rel_eds;
};

struct ExperimentSummary {
  std::uint64_t master_seed = 0;
  ReferencePoint reference;
  std::vector<SolverCurve> curves;
};

namespace detail {

inline void default_start(const SaddleProblem& p, Eigen::VectorXd& x0,
                          Eigen::VectorXd& y0) {
  if (x0.size() == 0) x0 = Eigen::VectorXd::Constant(p.dim_x(), 2.0);
  if (y0.size() == 0)
    y0 = Eigen::VectorXd::Constant(p.dim_y(), 1.0 / p.dim_y());
}

inline ReferencePoint resolve_reference(const SaddleProblem& p,
                                        const ExperimentPlan& plan) {
  if (plan.reference) return *plan.reference;
  if (auto ks = p.known_saddle()) {
    ReferencePoint r;
    r.x = ks->first;
    r.y = ks->second;
    return r;
  }
  return reference_solution(p, plan.ref_options);
}

}  // namespace detail

/// Runs every solver over num_paths independent streams and reduces the
/// relative error curves to per-iteration mean and sample standard
/// deviation.  Path (s, j) draws from the stream derived from
/// (master_seed, s, j), so summaries depend only on the seed, never on the
/// thread count; the reduction folds paths in index order.
inline ExperimentSummary run_experiment(const ExperimentPlan& plan) {
  if (!plan.problem) throw std::invalid_argument("run_experiment: no problem");
  const SaddleProblem& p = *plan.problem;
  Eigen::VectorXd x0 = plan.x0, y0 = plan.y0;
  detail::default_start(p, x0, y0);
  ReferencePoint ref = detail::resolve_reference(p, plan);
  double denom =
      (x0 - ref.x).squaredNorm() + (y0 - ref.y).squaredNorm();
  if (denom == 0.0)
    throw std::invalid_argument("run_experiment: start coincides with z*");

  ExperimentSummary out;
  out.master_seed = plan.master_seed;
  out.reference = ref;

  for (std::size_t s = 0; s < plan.solvers.size(); ++s) {
    const SolverEntry& entry = plan.solvers[s];
    std::vector<TrajectoryRecord> paths(plan.num_paths);
    parallel_for(plan.num_paths, plan.threads, [&](std::int64_t j) {
      RecordSpec rec;
      rec.x_star = ref.x;
      rec.y_star = ref.y;
      rec.denom = denom;
      rec.stride = plan.stride;
      rec.label = entry.label;
      rec.seed = plan.master_seed;
      if (entry.spec.kind == SolverKind::VrSapd) {
        RngStream r1 = RngStream::derive(plan.master_seed, s, j, 1);
        RngStream r2 = RngStream::derive(plan.master_seed, s, j, 2);
        paths[j] = run_vr_sapd(p, *entry.vr, x0, y0, plan.num_iters, r1, r2,
                               rec);
      } else {
        RngStream rng = RngStream::derive(plan.master_seed, s, j, 0);
        IterateState st = IterateState::init(x0, y0);
        paths[j] = run(p, entry.spec, st, plan.num_iters, rng, rec);
      }
    });

    SolverCurve curve;
    curve.label = entry.label.empty() ? solver_kind_name(entry.spec.kind)
                                      : entry.label;
    curve.kind = entry.spec.kind;
    const std::size_t npts = paths.empty() ? 0 : paths[0].ks.size();
    curve.ks.reserve(npts + 1);
    curve.mean_rel_eds.reserve(npts + 1);
    curve.std_rel_eds.reserve(npts + 1);
    curve.ks.push_back(0);  // anchor: the start has relative error 1
    curve.mean_rel_eds.push_back(1.0);
    curve.std_rel_eds.push_back(0.0);
    for (std::size_t i = 0; i < npts; ++i) {
      double mean = 0.0;
      for (const auto& pr : paths) mean += pr.rel_eds[i];
      mean /= static_cast<double>(paths.size());
      double var = 0.0;
      for (const auto& pr : paths) {
        double d = pr.rel_eds[i] - mean;
        var += d * d;
      }
      var = paths.size() > 1 ? var / static_cast<double>(paths.size() - 1)
                             : 0.0;
      curve.ks.push_back(paths[0].ks[i]);
      curve.mean_rel_eds.push_back(mean);
      curve.std_rel_eds.push_back(std::sqrt(var));
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

struct StationarySettings {
  std::int64_t burn_in = -1;  // < 0: sized from zeta to shrink 1e-6
  std::int64_t tail_len = 10000;
  std::int64_t num_paths = 8;
  int batches_per_path = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  Eigen::VectorXd x0, y0;
};

/// Tail moments of the SAPD chain.  mean is E_pi[z] over the stacked
/// (x, y); m2 and m4 are the second and fourth moments of |z - z*|.
/// Standard errors come from batch means, batches_per_path per path, so
/// autocorrelated tails still yield honest error bars when batches are
/// longer than the mixing time.
struct StationaryEstimate {
  Eigen::VectorXd mean;
  double se_mean = 0.0;  // L2 aggregate over coordinates
  double m2 = 0.0, se_m2 = 0.0;
  double m4 = 0.0, se_m4 = 0.0;
  std::int64_t burn_in = 0;
  std::int64_t samples = 0;
};

inline StationaryEstimate stationary_moments(const SaddleProblem& p,
                                             const SapdParams& params,
                                             const ReferencePoint& ref,
                                             const StationarySettings& cfg) {
  if (cfg.tail_len <
      static_cast<std::int64_t>(20) * cfg.batches_per_path)
    throw std::invalid_argument(
        "stationary_moments: tail_len below 20 samples per batch");
  if (cfg.num_paths < 1)
    throw std::invalid_argument("stationary_moments: need at least one path");

  Eigen::VectorXd x0 = cfg.x0, y0 = cfg.y0;
  detail::default_start(p, x0, y0);
  std::int64_t burn = cfg.burn_in;
  if (burn < 0) {
    BoundConstants bc = bound_constants(p.profile(), params);
    burn = burn_in_for(bc.zeta);
  }
  const std::int64_t batch_len = cfg.tail_len / cfg.batches_per_path;
  const int B = cfg.batches_per_path;
  const Eigen::Index dim = p.dim_x() + p.dim_y();

  struct BatchRow {
    Eigen::VectorXd mean_z;
    double m2, m4;
  };
  std::vector<std::vector<BatchRow>> rows(cfg.num_paths);

  parallel_for(cfg.num_paths, cfg.threads, [&](std::int64_t j) {
    RngStream rng = RngStream::derive(cfg.seed, 0, j, 3);
    IterateState st = IterateState::init(x0, y0);
    for (std::int64_t i = 0; i < burn; ++i) sapd_step(p, params, st, rng);
    rows[j].reserve(B);
    Eigen::VectorXd sum_z(dim);
    for (int b = 0; b < B; ++b) {
      sum_z.setZero();
      double s2 = 0.0, s4 = 0.0;
      for (std::int64_t i = 0; i < batch_len; ++i) {
        sapd_step(p, params, st, rng);
        sum_z.head(p.dim_x()) += st.x;
        sum_z.tail(p.dim_y()) += st.y;
        double d2 = (st.x - ref.x).squaredNorm() +
                    (st.y - ref.y).squaredNorm();
        s2 += d2;
        s4 += d2 * d2;
      }
      double inv = 1.0 / static_cast<double>(batch_len);
      rows[j].push_back({sum_z * inv, s2 * inv, s4 * inv});
    }
  });

  const std::int64_t nb = cfg.num_paths * B;
  StationaryEstimate est;
  est.burn_in = burn;
  est.samples = nb * batch_len;
  est.mean = Eigen::VectorXd::Zero(dim);
  for (const auto& path : rows)
    for (const auto& r : path) {
      est.mean += r.mean_z;
      est.m2 += r.m2;
      est.m4 += r.m4;
    }
  est.mean /= static_cast<double>(nb);
  est.m2 /= static_cast<double>(nb);
  est.m4 /= static_cast<double>(nb);

  double var_m2 = 0.0, var_m4 = 0.0, var_mean = 0.0;
  for (const auto& path : rows)
    for (const auto& r : path) {
      var_mean += (r.mean_z - est.mean).squaredNorm();
      var_m2 += (r.m2 - est.m2) * (r.m2 - est.m2);
      var_m4 += (r.m4 - est.m4) * (r.m4 - est.m4);
    }
  double dof = nb > 1 ? static_cast<double>(nb - 1) : 1.0;
  est.se_mean = std::sqrt(var_mean / dof / static_cast<double>(nb));
  est.se_m2 = std::sqrt(var_m2 / dof / static_cast<double>(nb));
  est.se_m4 = std::sqrt(var_m4 / dof / static_cast<double>(nb));
  return est;
}

struct BiasRow {
  double theta = 0.0;
  StationaryEstimate est;
  double bias = 0.0;  // |E_pi z - z*|
  double se = 0.0;
};

struct BiasTable {
  std::vector<BiasRow> rows;
  double slope = 0.0;  // least squares of log bias on log(1 - theta)
  bool has_vr = false;
  double vr_theta1 = 0.0, vr_theta2 = 0.0;
  Eigen::VectorXd vr_mean;
  double vr_bias = 0.0, vr_se = 0.0;
};

/// Stationary bias against theta, plus the Richardson-extrapolated mean for
/// an optional (theta1, theta2) pairing.  Each theta runs its own
/// independent set of paths; the extrapolated standard error combines the
/// two underlying ones with the extrapolation weights.
inline BiasTable bias_scan(const SaddleProblem& p,
                           const std::vector<double>& thetas,
                           std::optional<std::pair<double, double>> vr_pair,
                           const ReferencePoint& ref,
                           const StationarySettings& base) {
  Eigen::VectorXd z_star(p.dim_x() + p.dim_y());
  z_star << ref.x, ref.y;

  std::vector<double> all_thetas = thetas;
  if (vr_pair) {
    for (double t : {vr_pair->first, vr_pair->second}) {
      bool found = false;
      for (double u : all_thetas) found = found || u == t;
      if (!found) all_thetas.push_back(t);
    }
  }

  BiasTable table;
  std::vector<StationaryEstimate> ests(all_thetas.size());
  for (std::size_t i = 0; i < all_thetas.size(); ++i) {
    SapdParams prm = params_from_theta(p.profile(), all_thetas[i]);
    StationarySettings cfg = base;
    cfg.seed = mix_seed({base.seed, 0xB1A5ULL, static_cast<std::uint64_t>(i)});
    ests[i] = stationary_moments(p, prm, ref, cfg);
  }
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    BiasRow row;
    row.theta = thetas[i];
    row.est = ests[i];
    row.bias = (ests[i].mean - z_star).norm();
    row.se = ests[i].se_mean;
    table.rows.push_back(std::move(row));
  }

  // Slope of log bias against log(1 - theta) over the scanned rows.
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : table.rows) {
      if (r.bias <= 0.0) continue;
      double lx = std::log(1.0 - r.theta), ly = std::log(r.bias);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
      ++m;
    }
    if (m >= 2 && m * sxx - sx * sx > 0.0)
      table.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }

  if (vr_pair) {
    auto find = [&](double t) -> const StationaryEstimate& {
      for (std::size_t i = 0; i < all_thetas.size(); ++i)
        if (all_thetas[i] == t) return ests[i];
      throw std::logic_error("bias_scan: pairing theta not scanned");
    };
    const StationaryEstimate& e1 = find(vr_pair->first);
    const StationaryEstimate& e2 = find(vr_pair->second);
    ExtrapolationSpec vr;
    vr.theta1 = vr_pair->first;
    vr.theta2 = vr_pair->second;
    vr.validate();
    auto [w1, w2] = vr.weights();
    table.has_vr = true;
    table.vr_theta1 = vr_pair->first;
    table.vr_theta2 = vr_pair->second;
    table.vr_mean = w1 * e1.mean + w2 * e2.mean;
    table.vr_bias = (table.vr_mean - z_star).norm();
    table.vr_se = std::sqrt(w1 * w1 * e1.se_mean * e1.se_mean +
                            w2 * w2 * e2.se_mean * e2.se_mean);
  }
  return table;
}

}  // namespace sapd
