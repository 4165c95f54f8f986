#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sapd/errors.hpp"
#include "sapd/linalg.hpp"
#include "sapd/problem.hpp"

namespace sapd {

/// Binary classification data: one row of A per sample, labels in {-1, +1}.
struct Dataset {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int n() const { return static_cast<int>(A.rows()); }
  int d() const { return static_cast<int>(A.cols()); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    // trim surrounding whitespace
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Loads a delimited text table.  If the first row contains any non-numeric
/// cell it is treated as a header and label_column selects by name;
/// otherwise label_column must be a 0-based column index.  With a
/// positive_label, samples matching it map to +1 and every other label to
/// -1 (the one-vs-rest rule); without one the file must contain exactly two
/// label values, mapped in sorted order to {-1, +1}.
inline Dataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const std::string& positive_label = "") {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_csv: cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw ConfigError("load_csv: empty file " + path);

  bool header = false;
  for (const auto& cell : rows[0]) {
    double tmp;
    if (!detail::parse_double(cell, tmp)) header = true;
  }
  std::size_t label_idx = 0;
  if (header) {
    auto it = std::find(rows[0].begin(), rows[0].end(), label_column);
    if (it == rows[0].end())
      throw ConfigError("load_csv: label column '" + label_column +
                        "' not in header");
    label_idx = static_cast<std::size_t>(it - rows[0].begin());
  } else {
    try {
      label_idx = static_cast<std::size_t>(std::stoul(label_column));
    } catch (...) {
      throw ConfigError(
          "load_csv: headerless file needs a numeric label column index");
    }
    if (label_idx >= rows[0].size())
      throw ConfigError("load_csv: label column index out of range");
  }

  std::size_t first = header ? 1 : 0;
  std::size_t n = rows.size() - first;
  if (n == 0) throw ConfigError("load_csv: no data rows in " + path);
  std::size_t width = rows[first].size();
  if (label_idx >= width)
    throw ConfigError("load_csv: label column index out of range");

  Dataset ds;
  ds.A.resize(static_cast<Eigen::Index>(n),
              static_cast<Eigen::Index>(width - 1));
  std::vector<std::string> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[first + r];
    if (row.size() != width)
      throw ConfigError("load_csv: ragged row " + std::to_string(first + r + 1));
    Eigen::Index c_out = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_idx) {
        labels[r] = row[c];
        continue;
      }
      double v;
      if (!detail::parse_double(row[c], v))
        throw ConfigError("load_csv: bad numeric cell in row " +
                          std::to_string(first + r + 1));
      ds.A(static_cast<Eigen::Index>(r), c_out++) = v;
    }
  }

  ds.b.resize(static_cast<Eigen::Index>(n));
  if (!positive_label.empty()) {
    for (std::size_t r = 0; r < n; ++r)
      ds.b[static_cast<Eigen::Index>(r)] =
          labels[r] == positive_label ? 1.0 : -1.0;
  } else {
    std::map<std::string, double> seen;
    for (const auto& l : labels) seen.emplace(l, 0.0);
    if (seen.size() != 2)
      throw ConfigError(
          "load_csv: need exactly two label values or a positive_label");
    seen.begin()->second = -1.0;
    std::prev(seen.end())->second = 1.0;
    for (std::size_t r = 0; r < n; ++r)
      ds.b[static_cast<Eigen::Index>(r)] = seen[labels[r]];
  }
  bool has_pos = (ds.b.array() > 0).any();
  bool has_neg = (ds.b.array() < 0).any();
  if (!has_pos || !has_neg)
    throw ConfigError("load_csv: labels collapse to a single class");
  return ds;
}

/// Loads the svmlight format: "label idx:value ..." with 1-based feature
/// indices; width is the largest index seen.  Labels > 0 map to +1.
inline Dataset load_svmlight(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_svmlight: cannot open " + path);
  std::vector<std::vector<std::pair<int, double>>> feat;
  std::vector<double> labels;
  int dmax = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::string tok;
    if (!(is >> tok)) continue;
    double lab;
    if (!detail::parse_double(tok, lab))
      throw ConfigError("load_svmlight: bad label '" + tok + "'");
    labels.push_back(lab > 0.0 ? 1.0 : -1.0);
    feat.emplace_back();
    while (is >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ConfigError("load_svmlight: expected idx:value, got '" + tok +
                          "'");
      int idx = 0;
      double val = 0.0;
      try {
        idx = std::stoi(tok.substr(0, colon));
      } catch (...) {
        throw ConfigError("load_svmlight: bad feature index in '" + tok + "'");
      }
      if (!detail::parse_double(tok.substr(colon + 1), val))
        throw ConfigError("load_svmlight: bad feature value in '" + tok + "'");
      if (idx < 1) throw ConfigError("load_svmlight: indices are 1-based");
      dmax = std::max(dmax, idx);
      feat.back().emplace_back(idx - 1, val);
    }
  }
  if (labels.empty()) throw ConfigError("load_svmlight: no samples in " + path);
  Dataset ds;
  ds.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), dmax);
  ds.b.resize(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    ds.b[static_cast<Eigen::Index>(r)] = labels[r];
    for (auto [c, v] : feat[r]) ds.A(static_cast<Eigen::Index>(r), c) = v;
  }
  return ds;
}

enum class Normalization { None, MinMaxPerColumn, GlobalScale };

/// MinMaxPerColumn maps each feature to [0,1] (constant columns to 0);
/// GlobalScale divides the whole matrix by min(sqrt(d), sqrt(n)).
inline void normalize(Dataset& ds, Normalization scheme) {
  switch (scheme) {
    case Normalization::None:
      return;
    case Normalization::MinMaxPerColumn:
      for (Eigen::Index c = 0; c < ds.A.cols(); ++c) {
        double lo = ds.A.col(c).minCoeff();
        double hi = ds.A.col(c).maxCoeff();
        if (hi > lo)
          ds.A.col(c) = (ds.A.col(c).array() - lo) / (hi - lo);
        else
          ds.A.col(c).setZero();
      }
      return;
    case Normalization::GlobalScale: {
      double s = std::min(std::sqrt(static_cast<double>(ds.d())),
                          std::sqrt(static_cast<double>(ds.n())));
      if (s > 0.0) ds.A /= s;
      return;
    }
  }
}

/// Gaussian features at the given scale, labels from a planted unit
/// separator, optionally flipped with probability flip_prob.
inline Dataset make_synthetic(int n, int d, double feature_scale,
                              double flip_prob, std::uint64_t seed) {
  if (n < 2 || d < 1)
    throw std::invalid_argument("make_synthetic: need n >= 2, d >= 1");
  RngStream rng = RngStream::derive(seed, 0x5D47A0ULL);
  Dataset ds;
  ds.A.resize(n, d);
  ds.b.resize(n);
  Eigen::VectorXd w(d);
  rng.fill_gaussian(w);
  w /= w.norm();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.A(i, j) = feature_scale * rng.gaussian();
    double m = ds.A.row(i).dot(w);
    double lab = m >= 0.0 ? 1.0 : -1.0;
    if (flip_prob > 0.0 && rng.uniform() < flip_prob) lab = -lab;
    ds.b[i] = lab;
  }
  return ds;
}

/// Regularizer level that makes the dual penalty an eps-accurate surrogate
/// over a dual domain of radius D_y.
inline double mu_y_for_accuracy(double eps, double D_y = 1.0) {
  return eps / (2.0 * D_y);
}

struct RegDroConfig {
  double mu_x = 0.1;
  double mu_y = 10.0;
  double r = -1.0;                // <= 0 picks the default 2 sqrt(n)
  double ball_radius_sq = 100.0;  // primal constraint D_x
  int batch_size = 10;
  bool with_replacement = true;   // false is a test hook: full exact batch
};

/// Distributionally robust regularized logistic regression:
///   f(x, y) = (mu_x/2)|x|^2 + sum_i y_i phi_i(x) - (mu_y/2)|y|^2,
///   phi_i(x) = log(1 + exp(-b_i a_i' x)),
/// over the ball |x|^2 <= D_x and the uncertainty set P_r.  The stochastic
/// oracle resamples an independent uniform minibatch per call and rescales
/// by n/|B|, so both partial gradients are unbiased.
class RegDroProblem final : public SaddleProblem {
 public:
  RegDroProblem(Dataset ds, RegDroConfig cfg)
      : ds_(std::move(ds)), cfg_(cfg) {
    const int n = ds_.n();
    if (cfg_.batch_size < 1 || cfg_.batch_size > n)
      throw std::invalid_argument("RegDroProblem: bad batch size");
    if (!cfg_.with_replacement && cfg_.batch_size != n)
      throw std::invalid_argument(
          "RegDroProblem: replacement-free mode requires batch_size = n");
    double r = cfg_.r > 0.0 ? cfg_.r : 2.0 * std::sqrt(static_cast<double>(n));
    set_ = UncertaintySet{n, r};
    ball_ = std::make_unique<BallConstraint>(cfg_.ball_radius_sq);
    unc_ = std::make_unique<UncertaintyConstraint>(set_);

    double max_row_sq = 0.0;
    for (int i = 0; i < n; ++i)
      max_row_sq = std::max(max_row_sq, ds_.A.row(i).squaredNorm());
    profile_.mu_x = cfg_.mu_x;
    profile_.mu_y = cfg_.mu_y;
    profile_.L_xx = cfg_.mu_x + 0.25 * max_row_sq;
    profile_.L_yy = cfg_.mu_y;
    profile_.L_yx = spectral_norm(ds_.A);
    profile_.validate();
  }

  const char* name() const override { return "reg_dro"; }
  int dim_x() const override { return ds_.d(); }
  int dim_y() const override { return ds_.n(); }

  double value(const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) const override {
    Eigen::VectorXd m = ds_.A * x;
    double loss = 0.0;
    for (int i = 0; i < ds_.n(); ++i) loss += y[i] * softplus(-ds_.b[i] * m[i]);
    return 0.5 * cfg_.mu_x * x.squaredNorm() + loss -
           0.5 * cfg_.mu_y * y.squaredNorm();
  }

  void grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    Eigen::VectorXd m = ds_.A * x;
    Eigen::VectorXd w(ds_.n());
    for (int i = 0; i < ds_.n(); ++i)
      w[i] = -y[i] * ds_.b[i] * sigmoid(-ds_.b[i] * m[i]);
    out = cfg_.mu_x * x;
    out.noalias() += ds_.A.transpose() * w;
  }

  void grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              Eigen::VectorXd& out) const override {
    Eigen::VectorXd m = ds_.A * x;
    for (int i = 0; i < ds_.n(); ++i)
      out[i] = softplus(-ds_.b[i] * m[i]) - cfg_.mu_y * y[i];
  }

  void sample_grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    if (!cfg_.with_replacement) {
      grad_x(x, y, out);
      return;
    }
    out = cfg_.mu_x * x;
    const double scale =
        static_cast<double>(ds_.n()) / static_cast<double>(cfg_.batch_size);
    for (int s = 0; s < cfg_.batch_size; ++s) {
      int i = static_cast<int>(rng.integer_below(ds_.n()));
      double m = ds_.A.row(i).dot(x);
      double coeff = -scale * y[i] * ds_.b[i] * sigmoid(-ds_.b[i] * m);
      out.noalias() += coeff * ds_.A.row(i).transpose();
    }
  }

  void sample_grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     RngStream& rng, Eigen::VectorXd& out) const override {
    if (!cfg_.with_replacement) {
      grad_y(x, y, out);
      return;
    }
    out = -cfg_.mu_y * y;
    const double scale =
        static_cast<double>(ds_.n()) / static_cast<double>(cfg_.batch_size);
    for (int s = 0; s < cfg_.batch_size; ++s) {
      int i = static_cast<int>(rng.integer_below(ds_.n()));
      double m = ds_.A.row(i).dot(x);
      out[i] += scale * softplus(-ds_.b[i] * m);
    }
  }

  const CurvatureProfile& profile() const override { return profile_; }
  const Constraint* constraint_x() const override { return ball_.get(); }
  const Constraint* constraint_y() const override { return unc_.get(); }

  const Dataset& dataset() const { return ds_; }
  const RegDroConfig& config() const { return cfg_; }
  const UncertaintySet& uncertainty_set() const { return set_; }

 private:
  Dataset ds_;
  RegDroConfig cfg_;
  UncertaintySet set_;
  std::unique_ptr<BallConstraint> ball_;
  std::unique_ptr<UncertaintyConstraint> unc_;
  CurvatureProfile profile_;
};

}  // namespace sapd
