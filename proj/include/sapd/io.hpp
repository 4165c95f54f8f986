#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "sapd/config.hpp"
#include "sapd/errors.hpp"
#include "sapd/harness.hpp"
#include "sapd/params.hpp"
#include "sapd/reference.hpp"
#include "sapd/version.hpp"

namespace sapd {

/// Shortest round-trip decimal form.  Deterministic, so identical doubles
/// always serialize to identical bytes.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  return std::string(buf, res.ptr);
}

using MetaList = std::vector<std::pair<std::string, std::string>>;

inline MetaList standard_meta(const RunConfig& cfg) {
  return {{"version", kVersion},
          {"master_seed", std::to_string(cfg.experiment.master_seed)},
          {"config_hash", config_hash(cfg)}};
}

inline void write_meta(std::ostream& os, const MetaList& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
}

inline void write_summary_csv(std::ostream& os,
                              const ExperimentSummary& summary,
                              const MetaList& meta) {
  write_meta(os, meta);
  os << "solver,k,mean_rel_eds,std_rel_eds\n";
  for (const SolverCurve& c : summary.curves)
    for (std::size_t i = 0; i < c.ks.size(); ++i)
      os << c.label << ',' << c.ks[i] << ','
         << format_double(c.mean_rel_eds[i]) << ','
         << format_double(c.std_rel_eds[i]) << '\n';
}

inline void write_bias_csv(std::ostream& os, const BiasTable& table,
                           const MetaList& meta) {
  write_meta(os, meta);
  if (table.has_vr) {
    os << "# vr_theta1 = " << format_double(table.vr_theta1) << "\n"
       << "# vr_theta2 = " << format_double(table.vr_theta2) << "\n"
       << "# vr_bias = " << format_double(table.vr_bias) << "\n"
       << "# vr_se = " << format_double(table.vr_se) << "\n";
  }
  os << "# slope = " << format_double(table.slope) << "\n";
  os << "theta,bias,se_bias,m2,se_m2,m4,se_m4,burn_in,samples\n";
  for (const BiasRow& r : table.rows)
    os << format_double(r.theta) << ',' << format_double(r.bias) << ','
       << format_double(r.se) << ',' << format_double(r.est.m2) << ','
       << format_double(r.est.se_m2) << ',' << format_double(r.est.m4) << ','
       << format_double(r.est.se_m4) << ',' << r.est.burn_in << ','
       << r.est.samples << '\n';
}

namespace detail {

inline nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

inline nlohmann::json meta_json(const MetaList& meta) {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

}  // namespace detail

inline nlohmann::json summary_json(const ExperimentSummary& summary,
                                   const MetaList& meta) {
  nlohmann::json curves = nlohmann::json::array();
  for (const SolverCurve& c : summary.curves)
    curves.push_back({{"solver", c.label},
                      {"k", c.ks},
                      {"mean_rel_eds", c.mean_rel_eds},
                      {"std_rel_eds", c.std_rel_eds}});
  return {{"meta", detail::meta_json(meta)},
          {"reference",
           {{"x", detail::vec_json(summary.reference.x)},
            {"y", detail::vec_json(summary.reference.y)},
            {"iters", summary.reference.iters},
            {"residual", summary.reference.residual}}},
          {"curves", curves}};
}

inline nlohmann::json stationary_json(const StationaryEstimate& est) {
  return {{"mean", detail::vec_json(est.mean)}, {"se_mean", est.se_mean},
          {"m2", est.m2},                       {"se_m2", est.se_m2},
          {"m4", est.m4},                       {"se_m4", est.se_m4},
          {"burn_in", est.burn_in},             {"samples", est.samples}};
}

inline nlohmann::json bias_json(const BiasTable& table, const MetaList& meta) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BiasRow& r : table.rows) {
    nlohmann::json row = stationary_json(r.est);
    row["theta"] = r.theta;
    row["bias"] = r.bias;
    row["se_bias"] = r.se;
    rows.push_back(std::move(row));
  }
  nlohmann::json out = {{"meta", detail::meta_json(meta)},
                        {"slope", table.slope},
                        {"rows", rows}};
  if (table.has_vr)
    out["vr"] = {{"theta1", table.vr_theta1},
                 {"theta2", table.vr_theta2},
                 {"mean", detail::vec_json(table.vr_mean)},
                 {"bias", table.vr_bias},
                 {"se", table.vr_se}};
  return out;
}

inline nlohmann::json reference_json(const ReferencePoint& ref,
                                     const MetaList& meta) {
  return {{"meta", detail::meta_json(meta)},
          {"x", detail::vec_json(ref.x)},
          {"y", detail::vec_json(ref.y)},
          {"iters", ref.iters},
          {"residual", ref.residual}};
}

inline ReferencePoint load_reference_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open reference file " + path);
  nlohmann::json j;
  try {
    in >> j;
    ReferencePoint ref;
    ref.x = detail::vec_from_json(j.at("x"));
    ref.y = detail::vec_from_json(j.at("y"));
    ref.iters = j.value("iters", std::int64_t{0});
    ref.residual = j.value("residual", 0.0);
    return ref;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed reference file " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("short write to " + path);
}

}  // namespace sapd
