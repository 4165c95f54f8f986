#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sapd/dro.hpp"
#include "sapd/errors.hpp"
#include "sapd/harness.hpp"
#include "sapd/problem.hpp"
#include "sapd/solvers.hpp"
#include "sapd/vr.hpp"

namespace sapd {

/// Config files are INI-styled: [problem], one [solver] per solver lane,
/// [experiment], [output].  Lines are key = value; blank lines and lines
/// starting with # or ; are skipped.  Parsing is fail-closed: an unknown
/// section, an unknown key, a duplicate key, or a malformed value raises
/// ConfigError with the offending line number.

enum class ProblemKind { Quadratic, Logistic, Dro };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Quadratic;
  double mu_x = 1.0, mu_y = 1.0;
  int dim_x = 1, dim_y = 1;
  double coupling = 0.5;        // diagonal coupling block / logistic c
  double coupling_norm = -1.0;  // > 0: random coupling at this spectral norm
  double noise_sigma = 0.0;
  std::uint64_t problem_seed = 0;
  // dro only
  std::string dataset;
  std::string format;  // csv | svmlight | synthetic; empty infers from path
  std::string label_column = "label";
  std::string positive_label;
  std::string normalize = "none";  // none | minmax | global_scale
  double radius = -1.0;            // uncertainty budget r; <= 0: 2 sqrt(n)
  double ball_radius = 10.0;       // primal ball radius
  int batch_size = 10;
  bool with_replacement = true;
  int synthetic_n = 200, synthetic_d = 10;
  double feature_scale = 1.0;
  double flip_prob = 0.05;
};

struct SolverConfig {
  SolverKind kind = SolverKind::Sapd;
  double theta = -1.0;   // required for sapd / apd / vr_sapd
  double theta2 = -1.0;  // vr_sapd only; < 0 resolves to 2 theta - 1
  double eta = 0.0;      // baselines; 0 picks the 1/L (smp: 1/sqrt(L)) default
  std::string label;
  std::string vr_mode = "averaged";  // raw | averaged
  bool couple_noise = false;
};

struct ExperimentConfig {
  std::int64_t num_paths = 50;
  std::int64_t num_iters = 1000;
  std::int64_t stride = 1;
  std::uint64_t master_seed = 1;
  int threads = 1;
  // stationary / bias scan settings
  std::int64_t burn_in = -1;
  std::int64_t tail_len = 10000;
  std::int64_t stat_paths = 8;
  int batches_per_path = 20;
  std::vector<double> theta_list;
  std::optional<std::pair<double, double>> vr_pair;
  // reference handling
  std::string reference_file;
  double tol_rel = 1e-4;
  double residual_tol = 1e-6;
  double theta_floor = 0.9;
  std::int64_t max_ref_iters = 1000000;
};

struct OutputConfig {
  std::string dir = "out";
  bool write_json = true;
  bool write_csv = true;
};

struct RunConfig {
  ProblemConfig problem;
  std::vector<SolverConfig> solvers;
  ExperimentConfig experiment;
  OutputConfig output;
};

namespace detail {

struct RawEntry {
  std::string value;
  int line = 0;
};
using RawSection = std::map<std::string, RawEntry>;

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void config_fail(const std::string& src, int line,
                                     const std::string& what) {
  throw ConfigError(src + ":" + std::to_string(line) + ": " + what);
}

inline const std::set<std::string>& allowed_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"problem",
       {"kind", "mu_x", "mu_y", "dim_x", "dim_y", "coupling", "coupling_norm",
        "noise_sigma", "problem_seed", "dataset", "format", "label_column",
        "positive_label", "normalize", "radius", "ball_radius", "batch_size",
        "with_replacement", "synthetic_n", "synthetic_d", "feature_scale",
        "flip_prob"}},
      {"solver",
       {"kind", "theta", "theta2", "eta", "label", "vr_mode", "couple_noise"}},
      {"experiment",
       {"num_paths", "num_iters", "stride", "master_seed", "threads",
        "burn_in", "tail_len", "stat_paths", "batches_per_path", "theta_list",
        "vr_pair", "reference_file", "tol_rel", "residual_tol", "theta_floor",
        "max_ref_iters"}},
      {"output", {"dir", "write_json", "write_csv"}},
  };
  auto it = table.find(section);
  static const std::set<std::string> empty;
  return it == table.end() ? empty : it->second;
}

/// Typed accessors over one raw section; every parse failure carries the
/// source line of the value it choked on.
class SectionView {
 public:
  SectionView(const RawSection& kv, std::string section, std::string src)
      : kv_(&kv), section_(std::move(section)), src_(std::move(src)) {}

  bool has(const std::string& key) const { return kv_->count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv_->find(key);
    return it == kv_->end() ? fallback : it->second.value;
  }

  double num(const std::string& key, double fallback) const {
    auto it = kv_->find(key);
    if (it == kv_->end()) return fallback;
    double out;
    if (!parse_double(it->second.value, out))
      config_fail(src_, it->second.line,
                  "key '" + key + "': expected a number, got '" +
                      it->second.value + "'");
    return out;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    auto it = kv_->find(key);
    if (it == kv_->end()) return fallback;
    const std::string& v = it->second.value;
    errno = 0;
    char* end = nullptr;
    long long out = std::strtoll(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty())
      config_fail(src_, it->second.line,
                  "key '" + key + "': expected an integer, got '" + v + "'");
    return out;
  }

  std::uint64_t uinteger(const std::string& key,
                         std::uint64_t fallback) const {
    auto it = kv_->find(key);
    if (it == kv_->end()) return fallback;
    const std::string& v = it->second.value;
    errno = 0;
    char* end = nullptr;
    unsigned long long out = std::strtoull(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty() ||
        v.front() == '-')
      config_fail(src_, it->second.line,
                  "key '" + key + "': expected an unsigned integer, got '" +
                      v + "'");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = kv_->find(key);
    if (it == kv_->end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    config_fail(src_, it->second.line,
                "key '" + key + "': expected a boolean, got '" + v + "'");
  }

  std::vector<double> num_list(const std::string& key) const {
    auto it = kv_->find(key);
    std::vector<double> out;
    if (it == kv_->end()) return out;
    std::stringstream ss(it->second.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      double v;
      if (tok.empty() || !parse_double(tok, v))
        config_fail(src_, it->second.line,
                    "key '" + key + "': malformed number list");
      out.push_back(v);
    }
    if (out.empty())
      config_fail(src_, it->second.line, "key '" + key + "': empty list");
    return out;
  }

  int line_of(const std::string& key) const {
    auto it = kv_->find(key);
    return it == kv_->end() ? 0 : it->second.line;
  }

 private:
  const RawSection* kv_;
  std::string section_, src_;
};

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text,
                                   const std::string& source = "<config>") {
  using detail::config_fail;
  detail::RawSection problem, experiment, output;
  std::vector<detail::RawSection> solvers;
  detail::RawSection* current = nullptr;
  std::string current_name;
  bool saw_problem = false, saw_experiment = false, saw_output = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        config_fail(source, lineno, "unterminated section header");
      std::string name = detail::trim(t.substr(1, t.size() - 2));
      if (name == "problem") {
        if (saw_problem) config_fail(source, lineno, "duplicate [problem]");
        saw_problem = true;
        current = &problem;
      } else if (name == "solver") {
        solvers.emplace_back();
        current = &solvers.back();
      } else if (name == "experiment") {
        if (saw_experiment)
          config_fail(source, lineno, "duplicate [experiment]");
        saw_experiment = true;
        current = &experiment;
      } else if (name == "output") {
        if (saw_output) config_fail(source, lineno, "duplicate [output]");
        saw_output = true;
        current = &output;
      } else {
        config_fail(source, lineno, "unknown section [" + name + "]");
      }
      current_name = name;
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      config_fail(source, lineno, "expected key = value");
    if (!current)
      config_fail(source, lineno, "key outside of any section");
    std::string key = detail::trim(t.substr(0, eq));
    std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) config_fail(source, lineno, "empty key");
    if (!detail::allowed_keys(current_name).count(key))
      config_fail(source, lineno,
                  "unknown key '" + key + "' in [" + current_name + "]");
    if (current->count(key))
      config_fail(source, lineno,
                  "duplicate key '" + key + "' in [" + current_name + "]");
    (*current)[key] = {value, lineno};
  }
  if (!saw_problem) throw ConfigError(source + ": missing [problem] section");

  RunConfig cfg;
  {
    detail::SectionView v(problem, "problem", source);
    std::string kind = v.str("kind", "");
    if (kind == "quadratic")
      cfg.problem.kind = ProblemKind::Quadratic;
    else if (kind == "logistic")
      cfg.problem.kind = ProblemKind::Logistic;
    else if (kind == "dro")
      cfg.problem.kind = ProblemKind::Dro;
    else if (kind.empty())
      throw ConfigError(source + ": [problem] needs a kind");
    else
      config_fail(source, v.line_of("kind"),
                  "unknown problem kind '" + kind + "'");
    ProblemConfig& p = cfg.problem;
    p.mu_x = v.num("mu_x", p.mu_x);
    p.mu_y = v.num("mu_y", p.mu_y);
    p.dim_x = static_cast<int>(v.integer("dim_x", p.dim_x));
    p.dim_y = static_cast<int>(v.integer("dim_y", p.dim_y));
    p.coupling = v.num("coupling", p.coupling);
    p.coupling_norm = v.num("coupling_norm", p.coupling_norm);
    p.noise_sigma = v.num("noise_sigma", p.noise_sigma);
    p.problem_seed = v.uinteger("problem_seed", p.problem_seed);
    p.dataset = v.str("dataset", p.dataset);
    p.format = v.str("format", p.format);
    p.label_column = v.str("label_column", p.label_column);
    p.positive_label = v.str("positive_label", p.positive_label);
    p.normalize = v.str("normalize", p.normalize);
    p.radius = v.num("radius", p.radius);
    p.ball_radius = v.num("ball_radius", p.ball_radius);
    p.batch_size = static_cast<int>(v.integer("batch_size", p.batch_size));
    p.with_replacement = v.boolean("with_replacement", p.with_replacement);
    p.synthetic_n = static_cast<int>(v.integer("synthetic_n", p.synthetic_n));
    p.synthetic_d = static_cast<int>(v.integer("synthetic_d", p.synthetic_d));
    p.feature_scale = v.num("feature_scale", p.feature_scale);
    p.flip_prob = v.num("flip_prob", p.flip_prob);
    if (p.normalize != "none" && p.normalize != "minmax" &&
        p.normalize != "global_scale")
      config_fail(source, v.line_of("normalize"),
                  "unknown normalize scheme '" + p.normalize + "'");
    if (!p.format.empty() && p.format != "csv" && p.format != "svmlight" &&
        p.format != "synthetic")
      config_fail(source, v.line_of("format"),
                  "unknown dataset format '" + p.format + "'");
  }

  for (std::size_t i = 0; i < solvers.size(); ++i) {
    detail::SectionView v(solvers[i], "solver", source);
    SolverConfig s;
    std::string kind = v.str("kind", "");
    if (kind == "sapd")
      s.kind = SolverKind::Sapd;
    else if (kind == "apd")
      s.kind = SolverKind::Apd;
    else if (kind == "sgda")
      s.kind = SolverKind::Sgda;
    else if (kind == "smp")
      s.kind = SolverKind::Smp;
    else if (kind == "sogda")
      s.kind = SolverKind::Sogda;
    else if (kind == "vr_sapd")
      s.kind = SolverKind::VrSapd;
    else if (kind.empty())
      throw ConfigError(source + ": [solver] needs a kind");
    else
      config_fail(source, v.line_of("kind"),
                  "unknown solver kind '" + kind + "'");
    s.theta = v.num("theta", s.theta);
    s.theta2 = v.num("theta2", s.theta2);
    s.eta = v.num("eta", s.eta);
    s.label = v.str("label", s.label);
    s.vr_mode = v.str("vr_mode", s.vr_mode);
    s.couple_noise = v.boolean("couple_noise", s.couple_noise);
    bool needs_theta = s.kind == SolverKind::Sapd ||
                       s.kind == SolverKind::Apd ||
                       s.kind == SolverKind::VrSapd;
    if (needs_theta && !(s.theta > 0.0 && s.theta < 1.0))
      throw ConfigError(source + ": [solver] '" + kind +
                        "' needs theta in (0, 1)");
    if (s.vr_mode != "raw" && s.vr_mode != "averaged")
      config_fail(source, v.line_of("vr_mode"),
                  "unknown vr_mode '" + s.vr_mode + "'");
    cfg.solvers.push_back(std::move(s));
  }

  {
    detail::SectionView v(experiment, "experiment", source);
    ExperimentConfig& e = cfg.experiment;
    e.num_paths = v.integer("num_paths", e.num_paths);
    e.num_iters = v.integer("num_iters", e.num_iters);
    e.stride = v.integer("stride", e.stride);
    e.master_seed = v.uinteger("master_seed", e.master_seed);
    e.threads = static_cast<int>(v.integer("threads", e.threads));
    e.burn_in = v.integer("burn_in", e.burn_in);
    e.tail_len = v.integer("tail_len", e.tail_len);
    e.stat_paths = v.integer("stat_paths", e.stat_paths);
    e.batches_per_path =
        static_cast<int>(v.integer("batches_per_path", e.batches_per_path));
    if (v.has("theta_list")) e.theta_list = v.num_list("theta_list");
    if (v.has("vr_pair")) {
      std::vector<double> pair = v.num_list("vr_pair");
      if (pair.size() != 2)
        config_fail(source, v.line_of("vr_pair"),
                    "vr_pair needs exactly two thetas");
      e.vr_pair = {pair[0], pair[1]};
    }
    e.reference_file = v.str("reference_file", e.reference_file);
    e.tol_rel = v.num("tol_rel", e.tol_rel);
    e.residual_tol = v.num("residual_tol", e.residual_tol);
    e.theta_floor = v.num("theta_floor", e.theta_floor);
    e.max_ref_iters = v.integer("max_ref_iters", e.max_ref_iters);
    if (e.num_paths < 1 || e.num_iters < 1 || e.stride < 1 || e.threads < 1)
      throw ConfigError(source +
                        ": [experiment] counts must be at least one");
  }

  {
    detail::SectionView v(output, "output", source);
    cfg.output.dir = v.str("dir", cfg.output.dir);
    cfg.output.write_json = v.boolean("write_json", cfg.output.write_json);
    cfg.output.write_csv = v.boolean("write_csv", cfg.output.write_csv);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace detail {

inline std::string canon_num(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace detail

/// Deterministic dump of the effective configuration, defaults included.
/// The FNV hash of this text stamps every output file so results can be
/// traced back to the exact settings that produced them.
inline std::string canonical_text(const RunConfig& cfg) {
  std::ostringstream o;
  const ProblemConfig& p = cfg.problem;
  auto kind_name = [&] {
    switch (p.kind) {
      case ProblemKind::Quadratic: return "quadratic";
      case ProblemKind::Logistic: return "logistic";
      case ProblemKind::Dro: return "dro";
    }
    return "";
  };
  auto num = detail::canon_num;
  o << "problem.kind = " << kind_name() << "\n"
    << "problem.mu_x = " << num(p.mu_x) << "\n"
    << "problem.mu_y = " << num(p.mu_y) << "\n"
    << "problem.dim_x = " << p.dim_x << "\n"
    << "problem.dim_y = " << p.dim_y << "\n"
    << "problem.coupling = " << num(p.coupling) << "\n"
    << "problem.coupling_norm = " << num(p.coupling_norm) << "\n"
    << "problem.noise_sigma = " << num(p.noise_sigma) << "\n"
    << "problem.problem_seed = " << p.problem_seed << "\n"
    << "problem.dataset = " << p.dataset << "\n"
    << "problem.format = " << p.format << "\n"
    << "problem.label_column = " << p.label_column << "\n"
    << "problem.positive_label = " << p.positive_label << "\n"
    << "problem.normalize = " << p.normalize << "\n"
    << "problem.radius = " << num(p.radius) << "\n"
    << "problem.ball_radius = " << num(p.ball_radius) << "\n"
    << "problem.batch_size = " << p.batch_size << "\n"
    << "problem.with_replacement = " << (p.with_replacement ? 1 : 0) << "\n"
    << "problem.synthetic_n = " << p.synthetic_n << "\n"
    << "problem.synthetic_d = " << p.synthetic_d << "\n"
    << "problem.feature_scale = " << num(p.feature_scale) << "\n"
    << "problem.flip_prob = " << num(p.flip_prob) << "\n";
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    const SolverConfig& s = cfg.solvers[i];
    o << "solver." << i << ".kind = " << solver_kind_name(s.kind) << "\n"
      << "solver." << i << ".theta = " << num(s.theta) << "\n"
      << "solver." << i << ".theta2 = " << num(s.theta2) << "\n"
      << "solver." << i << ".eta = " << num(s.eta) << "\n"
      << "solver." << i << ".label = " << s.label << "\n"
      << "solver." << i << ".vr_mode = " << s.vr_mode << "\n"
      << "solver." << i << ".couple_noise = " << (s.couple_noise ? 1 : 0)
      << "\n";
  }
  const ExperimentConfig& e = cfg.experiment;
  o << "experiment.num_paths = " << e.num_paths << "\n"
    << "experiment.num_iters = " << e.num_iters << "\n"
    << "experiment.stride = " << e.stride << "\n"
    << "experiment.master_seed = " << e.master_seed << "\n"
    << "experiment.burn_in = " << e.burn_in << "\n"
    << "experiment.tail_len = " << e.tail_len << "\n"
    << "experiment.stat_paths = " << e.stat_paths << "\n"
    << "experiment.batches_per_path = " << e.batches_per_path << "\n";
  o << "experiment.theta_list =";
  for (double t : e.theta_list) o << " " << num(t);
  o << "\n";
  o << "experiment.vr_pair =";
  if (e.vr_pair)
    o << " " << num(e.vr_pair->first) << " " << num(e.vr_pair->second);
  o << "\n";
  o << "experiment.reference_file = " << e.reference_file << "\n"
    << "experiment.tol_rel = " << num(e.tol_rel) << "\n"
    << "experiment.residual_tol = " << num(e.residual_tol) << "\n"
    << "experiment.theta_floor = " << num(e.theta_floor) << "\n"
    << "experiment.max_ref_iters = " << e.max_ref_iters << "\n";
  return o.str();
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string config_hash(const RunConfig& cfg) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text(cfg))));
  return buf;
}

/// Instantiates the configured problem.  Thread count and seeds live in the
/// experiment section; everything the objective needs is here.
inline std::shared_ptr<SaddleProblem> make_problem(const ProblemConfig& pc) {
  switch (pc.kind) {
    case ProblemKind::Quadratic: {
      if (pc.dim_x < 1 || pc.dim_y < 1)
        throw ConfigError("quadratic problem needs positive dimensions");
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(pc.dim_y, pc.dim_x);
      if (pc.coupling_norm > 0.0) {
        RngStream rng = RngStream::derive(pc.problem_seed, 0xC0DEULL);
        for (Eigen::Index i = 0; i < C.rows(); ++i)
          for (Eigen::Index j = 0; j < C.cols(); ++j)
            C(i, j) = rng.gaussian();
        double s = spectral_norm(C);
        if (s > 0.0) C *= pc.coupling_norm / s;
      } else {
        for (Eigen::Index i = 0; i < std::min(C.rows(), C.cols()); ++i)
          C(i, i) = pc.coupling;
      }
      return std::make_shared<QuadraticSaddle>(pc.mu_x, pc.mu_y, C,
                                               pc.noise_sigma);
    }
    case ProblemKind::Logistic:
      return std::make_shared<LogisticPerturbedSaddle>(
          pc.mu_x, pc.coupling, pc.mu_y, pc.noise_sigma);
    case ProblemKind::Dro: {
      Dataset ds;
      std::string fmt = pc.format;
      if (fmt.empty()) {
        if (pc.dataset.empty())
          throw ConfigError("dro problem needs a dataset or format");
        fmt = pc.dataset.size() > 4 &&
                      pc.dataset.substr(pc.dataset.size() - 4) == ".csv"
                  ? "csv"
                  : "svmlight";
      }
      if (fmt == "synthetic") {
        ds = make_synthetic(pc.synthetic_n, pc.synthetic_d, pc.feature_scale,
                            pc.flip_prob, pc.problem_seed);
      } else if (fmt == "csv") {
        ds = load_csv(pc.dataset, pc.label_column, pc.positive_label);
      } else {
        ds = load_svmlight(pc.dataset);
      }
      Normalization scheme = Normalization::None;
      if (pc.normalize == "minmax") scheme = Normalization::MinMaxPerColumn;
      if (pc.normalize == "global_scale")
        scheme = Normalization::GlobalScale;
      normalize(ds, scheme);
      RegDroConfig rc;
      rc.mu_x = pc.mu_x;
      rc.mu_y = pc.mu_y;
      rc.r = pc.radius;
      rc.ball_radius_sq = pc.ball_radius * pc.ball_radius;
      rc.batch_size = pc.batch_size;
      rc.with_replacement = pc.with_replacement;
      return std::make_shared<RegDroProblem>(std::move(ds), rc);
    }
  }
  throw ConfigError("unreachable problem kind");
}

inline SolverEntry make_entry(const SolverConfig& sc,
                              const CurvatureProfile& prof) {
  SolverEntry e;
  e.label = sc.label.empty() ? solver_kind_name(sc.kind) : sc.label;
  e.spec.kind = sc.kind;
  switch (sc.kind) {
    case SolverKind::Sapd:
      e.spec = SolverSpec::sapd(params_from_theta(prof, sc.theta));
      break;
    case SolverKind::Apd:
      e.spec = SolverSpec::apd(params_from_theta(prof, sc.theta));
      break;
    case SolverKind::VrSapd: {
      ExtrapolationSpec vr;
      vr.theta1 = sc.theta;
      vr.theta2 = sc.theta2;
      vr.mode = sc.vr_mode == "raw" ? ExtrapolationSpec::Mode::Raw
                                    : ExtrapolationSpec::Mode::Averaged;
      vr.couple_noise = sc.couple_noise;
      vr.validate();
      e.spec.params = params_from_theta(prof, sc.theta);
      e.vr = vr;
      break;
    }
    default:
      e.spec.eta = sc.eta;
      break;
  }
  return e;
}

inline ExperimentPlan make_plan(const RunConfig& cfg,
                                std::shared_ptr<const SaddleProblem> problem) {
  ExperimentPlan plan;
  plan.problem = std::move(problem);
  for (const SolverConfig& sc : cfg.solvers)
    plan.solvers.push_back(make_entry(sc, plan.problem->profile()));
  plan.num_paths = cfg.experiment.num_paths;
  plan.num_iters = cfg.experiment.num_iters;
  plan.stride = cfg.experiment.stride;
  plan.master_seed = cfg.experiment.master_seed;
  plan.threads = cfg.experiment.threads;
  plan.ref_options.tol_rel = cfg.experiment.tol_rel;
  plan.ref_options.residual_tol = cfg.experiment.residual_tol;
  plan.ref_options.theta_floor = cfg.experiment.theta_floor;
  plan.ref_options.max_iters = cfg.experiment.max_ref_iters;
  return plan;
}

inline StationarySettings make_stationary(const ExperimentConfig& e) {
  StationarySettings s;
  s.burn_in = e.burn_in;
  s.tail_len = e.tail_len;
  s.num_paths = e.stat_paths;
  s.batches_per_path = e.batches_per_path;
  s.seed = e.master_seed;
  s.threads = e.threads;
  return s;
}

}  // namespace sapd
