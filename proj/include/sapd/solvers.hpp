#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sapd/params.hpp"
#include "sapd/problem.hpp"
#include "sapd/rng.hpp"

namespace sapd {

enum class SolverKind { Sapd, Apd, Sgda, Smp, Sogda, VrSapd };

inline const char* solver_kind_name(SolverKind k) {
  switch (k) {
    case SolverKind::Sapd: return "sapd";
    case SolverKind::Apd: return "apd";
    case SolverKind::Sgda: return "sgda";
    case SolverKind::Smp: return "smp";
    case SolverKind::Sogda: return "sogda";
    case SolverKind::VrSapd: return "vr_sapd";
  }
  return "?";
}

/// Markov state of one chain: current and previous primal-dual pairs plus
/// the stored gradients the momentum/optimistic corrections need.  Holds
/// everything required to continue a run bit-exactly (the RNG stream is
/// checkpointed separately).  At k = 0 the previous pair aliases the start,
/// which encodes the z_{-1} = z_0 convention: the first SAPD step draws one
/// dual gradient and uses it for both momentum terms.
struct IterateState {
  Eigen::VectorXd x, y;
  Eigen::VectorXd x_prev, y_prev;
  Eigen::VectorXd g_y_prev;         // momentum memory (SAPD) / pair (S-OGDA)
  Eigen::VectorXd g_x_prev;         // S-OGDA only
  std::int64_t k = 0;
  bool momentum_primed = false;     // g_y_prev holds a real draw
  bool grads_primed = false;        // S-OGDA pair held

  // Scratch; never serialized, never read across steps.
  Eigen::VectorXd gx_buf, gy_buf, q_buf, wx_buf, wy_buf;

  static IterateState init(Eigen::VectorXd x0, Eigen::VectorXd y0) {
    IterateState s;
    s.x = x0;
    s.y = y0;
    s.x_prev = std::move(x0);
    s.y_prev = std::move(y0);
    s.g_y_prev = Eigen::VectorXd::Zero(s.y.size());
    s.g_x_prev = Eigen::VectorXd::Zero(s.x.size());
    s.ensure_scratch();
    return s;
  }

  void ensure_scratch() {
    auto fit = [](Eigen::VectorXd& v, Eigen::Index n) {
      if (v.size() != n) v.resize(n);
    };
    fit(gx_buf, x.size());
    fit(gy_buf, y.size());
    fit(q_buf, y.size());
    fit(wx_buf, x.size());
    fit(wy_buf, y.size());
  }

  /// Exact text round trip (hexfloat), small enough for checkpoints.
  std::string serialize() const {
    std::ostringstream os;
    os << "iterate-state 1\n" << k << ' ' << momentum_primed << ' '
       << grads_primed << '\n';
    auto put = [&os](const Eigen::VectorXd& v) {
      os << v.size();
      char buf[40];
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %a", v[i]);
        os << buf;
      }
      os << '\n';
    };
    put(x);
    put(y);
    put(x_prev);
    put(y_prev);
    put(g_y_prev);
    put(g_x_prev);
    return os.str();
  }

  static IterateState deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "iterate-state" || version != 1)
      throw std::invalid_argument("IterateState: unrecognized checkpoint");
    IterateState s;
    is >> s.k >> s.momentum_primed >> s.grads_primed;
    auto get = [&is](Eigen::VectorXd& v) {
      Eigen::Index n = 0;
      is >> n;
      v.resize(n);
      std::string w;
      for (Eigen::Index i = 0; i < n; ++i) {
        is >> w;
        v[i] = std::strtod(w.c_str(), nullptr);
      }
    };
    get(s.x);
    get(s.y);
    get(s.x_prev);
    get(s.y_prev);
    get(s.g_y_prev);
    get(s.g_x_prev);
    if (!is) throw std::invalid_argument("IterateState: truncated checkpoint");
    s.ensure_scratch();
    return s;
  }
};

namespace detail {

inline void project_x(const SaddleProblem& p, Eigen::VectorXd& v) {
  if (const Constraint* c = p.constraint_x()) c->project(v);
}

inline void project_y(const SaddleProblem& p, Eigen::VectorXd& v) {
  if (const Constraint* c = p.constraint_y()) c->project(v);
}

inline void draw_gx(const SaddleProblem& p, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y, RngStream& rng, bool stochastic,
                    Eigen::VectorXd& out) {
  if (stochastic)
    p.sample_grad_x(x, y, rng, out);
  else
    p.grad_x(x, y, out);
}

inline void draw_gy(const SaddleProblem& p, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y, RngStream& rng, bool stochastic,
                    Eigen::VectorXd& out) {
  if (stochastic)
    p.sample_grad_y(x, y, rng, out);
  else
    p.grad_y(x, y, out);
}

}  // namespace detail

/// One SAPD step:
///   q = (1+theta) gy(z_k) - theta gy(z_{k-1})     (momentum-corrected dual)
///   y+ = proj(y + sigma q)
///   x+ = proj(x - tau gx(x, y+))
/// One dual draw at z_k and one primal draw at (x_k, y+) per step; the dual
/// draw is retained for the next step's momentum term.
inline void sapd_step(const SaddleProblem& p, const SapdParams& s,
                      IterateState& st, RngStream& rng,
                      bool stochastic = true) {
  detail::draw_gy(p, st.x, st.y, rng, stochastic, st.gy_buf);
  if (st.momentum_primed)
    st.q_buf = (1.0 + s.theta) * st.gy_buf - s.theta * st.g_y_prev;
  else
    st.q_buf = st.gy_buf;  // z_{-1} = z_0: the same draw serves both terms
  st.wy_buf = st.y + s.sigma * st.q_buf;
  detail::project_y(p, st.wy_buf);

  detail::draw_gx(p, st.x, st.wy_buf, rng, stochastic, st.gx_buf);
  st.wx_buf = st.x - s.tau * st.gx_buf;
  detail::project_x(p, st.wx_buf);

  st.x_prev.swap(st.x);
  st.y_prev.swap(st.y);
  st.x.swap(st.wx_buf);
  st.y.swap(st.wy_buf);
  st.g_y_prev.swap(st.gy_buf);
  st.momentum_primed = true;
  ++st.k;
}

/// Simultaneous projected stochastic gradient descent ascent.
inline void sgda_step(const SaddleProblem& p, double eta, IterateState& st,
                      RngStream& rng, bool stochastic = true) {
  detail::draw_gx(p, st.x, st.y, rng, stochastic, st.gx_buf);
  detail::draw_gy(p, st.x, st.y, rng, stochastic, st.gy_buf);
  st.wx_buf = st.x - eta * st.gx_buf;
  st.wy_buf = st.y + eta * st.gy_buf;
  detail::project_x(p, st.wx_buf);
  detail::project_y(p, st.wy_buf);
  st.x_prev.swap(st.x);
  st.y_prev.swap(st.y);
  st.x.swap(st.wx_buf);
  st.y.swap(st.wy_buf);
  ++st.k;
}

/// Euclidean stochastic mirror-prox (extragradient): a projected half step
/// to w with one fresh draw pair, then the full step from z_k using an
/// independent draw pair evaluated at w.
inline void smp_step(const SaddleProblem& p, double eta, IterateState& st,
                     RngStream& rng, bool stochastic = true) {
  detail::draw_gx(p, st.x, st.y, rng, stochastic, st.gx_buf);
  detail::draw_gy(p, st.x, st.y, rng, stochastic, st.gy_buf);
  st.wx_buf = st.x - eta * st.gx_buf;
  st.wy_buf = st.y + eta * st.gy_buf;
  detail::project_x(p, st.wx_buf);
  detail::project_y(p, st.wy_buf);

  detail::draw_gx(p, st.wx_buf, st.wy_buf, rng, stochastic, st.gx_buf);
  detail::draw_gy(p, st.wx_buf, st.wy_buf, rng, stochastic, st.gy_buf);
  st.wx_buf = st.x - eta * st.gx_buf;
  st.wy_buf = st.y + eta * st.gy_buf;
  detail::project_x(p, st.wx_buf);
  detail::project_y(p, st.wy_buf);
  st.x_prev.swap(st.x);
  st.y_prev.swap(st.y);
  st.x.swap(st.wx_buf);
  st.y.swap(st.wy_buf);
  ++st.k;
}

/// Stochastic optimistic gradient descent ascent: one draw pair per step,
/// with the optimistic correction 2 g_k - g_{k-1}; at k = 0 the stored pair
/// is the current one (g_{-1} = g_0) and the step reduces to SGDA.
inline void sogda_step(const SaddleProblem& p, double eta, IterateState& st,
                       RngStream& rng, bool stochastic = true) {
  detail::draw_gx(p, st.x, st.y, rng, stochastic, st.gx_buf);
  detail::draw_gy(p, st.x, st.y, rng, stochastic, st.gy_buf);
  if (st.grads_primed) {
    st.wx_buf = st.x - eta * (2.0 * st.gx_buf - st.g_x_prev);
    st.wy_buf = st.y + eta * (2.0 * st.gy_buf - st.g_y_prev);
  } else {
    st.wx_buf = st.x - eta * st.gx_buf;
    st.wy_buf = st.y + eta * st.gy_buf;
  }
  detail::project_x(p, st.wx_buf);
  detail::project_y(p, st.wy_buf);
  st.x_prev.swap(st.x);
  st.y_prev.swap(st.y);
  st.x.swap(st.wx_buf);
  st.y.swap(st.wy_buf);
  st.g_x_prev.swap(st.gx_buf);
  st.g_y_prev.swap(st.gy_buf);
  st.grads_primed = true;
  ++st.k;
}

/// Coarse smoothness scale used by the baseline step rules, taken over the
/// stored profile constants (L_xx already includes the regularizer here).
inline double baseline_L(const CurvatureProfile& p) {
  return std::max({p.L_xx, p.L_yy, p.L_yx});
}

/// Default steps: 1/L for SGDA and S-OGDA, 1/sqrt(L) for SMP (as stated in
/// the source experiments, dimensional oddity included).
inline double default_eta(const CurvatureProfile& p, SolverKind kind) {
  double L = baseline_L(p);
  if (kind == SolverKind::Smp) return 1.0 / std::sqrt(L);
  return 1.0 / L;
}

/// Everything needed to drive one chain of any solver kind.  eta <= 0 asks
/// for the default baseline step.  stochastic = false runs the noiseless
/// recursion (APD is exactly SAPD with this flag off).
struct SolverSpec {
  SolverKind kind = SolverKind::Sapd;
  SapdParams params{};
  double eta = 0.0;
  bool stochastic = true;

  static SolverSpec sapd(SapdParams p) {
    return {SolverKind::Sapd, p, 0.0, true};
  }
  static SolverSpec apd(SapdParams p) {
    return {SolverKind::Apd, p, 0.0, false};
  }
};

using Recorder = std::function<void(std::int64_t, const IterateState&)>;

/// Trajectory of one chain at a fixed recording stride.
struct TrajectoryRecord {
  std::string label;
  std::uint64_t seed = 0;
  std::int64_t stride = 1;
  std::vector<std::int64_t> ks;
  std::vector<double> rel_eds;
  std::vector<Eigen::VectorXd> xs, ys;  // filled only on request
};

struct RecordSpec {
  Eigen::VectorXd x_star, y_star;  // empty: skip the rel-EDS column
  double denom = 1.0;              // |z_0 - z*|^2
  std::int64_t stride = 1;
  bool dump_iterates = false;
  std::string label;
  std::uint64_t seed = 0;
};

inline void step_solver(const SaddleProblem& p, const SolverSpec& spec,
                        IterateState& st, RngStream& rng) {
  switch (spec.kind) {
    case SolverKind::Sapd:
      sapd_step(p, spec.params, st, rng, spec.stochastic);
      break;
    case SolverKind::Apd:
      sapd_step(p, spec.params, st, rng, false);
      break;
    case SolverKind::Sgda:
      sgda_step(p, spec.eta, st, rng, spec.stochastic);
      break;
    case SolverKind::Smp:
      smp_step(p, spec.eta, st, rng, spec.stochastic);
      break;
    case SolverKind::Sogda:
      sogda_step(p, spec.eta, st, rng, spec.stochastic);
      break;
    case SolverKind::VrSapd:
      throw std::logic_error("step_solver: VR-SAPD runs paired chains");
  }
}

/// Resolves defaulted etas so a spec is ready to step.
inline SolverSpec resolve_spec(const SaddleProblem& p, SolverSpec spec) {
  if (spec.kind == SolverKind::Sgda || spec.kind == SolverKind::Smp ||
      spec.kind == SolverKind::Sogda) {
    if (spec.eta <= 0.0) spec.eta = default_eta(p.profile(), spec.kind);
  }
  return spec;
}

/// Drives num_iters steps, invoking the recorder after every step.
inline void run(const SaddleProblem& p, const SolverSpec& spec_in,
                IterateState& st, std::int64_t num_iters, RngStream& rng,
                const Recorder& rec = {}) {
  SolverSpec spec = resolve_spec(p, spec_in);
  for (std::int64_t i = 0; i < num_iters; ++i) {
    step_solver(p, spec, st, rng);
    if (rec) rec(st.k, st);
  }
}

/// As above, additionally collecting a TrajectoryRecord at record.stride.
inline TrajectoryRecord run(const SaddleProblem& p, const SolverSpec& spec_in,
                            IterateState& st, std::int64_t num_iters,
                            RngStream& rng, const RecordSpec& record,
                            const Recorder& rec = {}) {
  SolverSpec spec = resolve_spec(p, spec_in);
  TrajectoryRecord out;
  out.label = record.label.empty() ? solver_kind_name(spec.kind) : record.label;
  out.seed = record.seed;
  out.stride = record.stride;
  bool with_eds = record.x_star.size() > 0;
  for (std::int64_t i = 0; i < num_iters; ++i) {
    step_solver(p, spec, st, rng);
    if (rec) rec(st.k, st);
    if (st.k % record.stride == 0 || i + 1 == num_iters) {
      out.ks.push_back(st.k);
      if (with_eds) {
        double d2 = (st.x - record.x_star).squaredNorm() +
                    (st.y - record.y_star).squaredNorm();
        out.rel_eds.push_back(d2 / record.denom);
      }
      if (record.dump_iterates) {
        out.xs.push_back(st.x);
        out.ys.push_back(st.y);
      }
    }
  }
  return out;
}

}  // namespace sapd
