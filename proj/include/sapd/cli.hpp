#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "sapd/config.hpp"
#include "sapd/harness.hpp"
#include "sapd/io.hpp"
#include "sapd/params.hpp"
#include "sapd/reference.hpp"

namespace sapd {

/// Command bodies shared by the CLI tool and the test suite.  Each takes a
/// fully parsed config, writes result files under cfg.output.dir, logs a
/// short human-readable account to `log`, and returns a process exit code.
/// Error mapping happens one level up in run_cli_action.

namespace detail {

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output.dir) / name).string();
}

inline ReferencePoint reference_for(const RunConfig& cfg,
                                    const SaddleProblem& p) {
  if (!cfg.experiment.reference_file.empty())
    return load_reference_json(cfg.experiment.reference_file);
  if (auto ks = p.known_saddle()) {
    ReferencePoint r;
    r.x = ks->first;
    r.y = ks->second;
    return r;
  }
  ReferenceOptions opt;
  opt.tol_rel = cfg.experiment.tol_rel;
  opt.residual_tol = cfg.experiment.residual_tol;
  opt.theta_floor = cfg.experiment.theta_floor;
  opt.max_iters = cfg.experiment.max_ref_iters;
  return reference_solution(p, opt);
}

}  // namespace detail

/// Certificate check for every configured momentum solver (plus any thetas
/// in theta_list).  Reports are always written; the exit code is 0 only
/// when every checked theta passes.
inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  std::shared_ptr<SaddleProblem> problem = make_problem(cfg.problem);
  const CurvatureProfile& prof = problem->profile();
  ThetaThresholds th = theta_thresholds(prof);

  std::vector<double> thetas;
  for (const SolverConfig& s : cfg.solvers) {
    if (s.theta > 0.0) thetas.push_back(s.theta);
    if (s.kind == SolverKind::VrSapd)
      thetas.push_back(s.theta2 > 0.0 ? s.theta2 : 2.0 * s.theta - 1.0);
  }
  for (double t : cfg.experiment.theta_list) thetas.push_back(t);
  if (thetas.empty())
    throw ConfigError(
        "verify needs [solver] sections with theta or a theta_list");

  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;
  for (double t : thetas) {
    SapdParams prm = params_from_theta(prof, t);
    CertificateReport rep = check_admissibility(prof, prm);
    all_pass = all_pass && rep.pass;
    log << "theta=" << format_double(t) << " tau=" << format_double(prm.tau)
        << " sigma=" << format_double(prm.sigma)
        << " pass=" << (rep.pass ? "true" : "false")
        << " min_eig=" << format_double(rep.min_eig_full) << "\n";
    checks.push_back({{"theta", t},
                      {"tau", prm.tau},
                      {"sigma", prm.sigma},
                      {"alpha", prm.alpha},
                      {"certificate", rep.to_json()}});
  }
  log << "theta_hat_1=" << format_double(th.theta_hat_1)
      << " theta_hat_2=" << format_double(th.theta_hat_2) << "\n";

  if (cfg.output.write_json) {
    nlohmann::json out = {{"meta", detail::meta_json(standard_meta(cfg))},
                          {"theta_hat_1", th.theta_hat_1},
                          {"theta_hat_2", th.theta_hat_2},
                          {"checks", checks}};
    std::string path = detail::out_path(cfg, "certificates.json");
    write_text_file(path, out.dump(2) + "\n");
    log << "wrote " << path << "\n";
  }
  return all_pass ? 0 : 3;
}

inline int cmd_run(const RunConfig& cfg, std::ostream& log) {
  if (cfg.solvers.empty())
    throw ConfigError("run needs at least one [solver] section");
  std::shared_ptr<SaddleProblem> problem = make_problem(cfg.problem);
  ExperimentPlan plan = make_plan(cfg, problem);
  if (!cfg.experiment.reference_file.empty())
    plan.reference = load_reference_json(cfg.experiment.reference_file);

  ExperimentSummary summary = run_experiment(plan);
  MetaList meta = standard_meta(cfg);

  for (const SolverCurve& c : summary.curves)
    log << c.label << ": final mean_rel_eds="
        << format_double(c.mean_rel_eds.back()) << " after "
        << c.ks.back() << " iters\n";

  if (cfg.output.write_csv) {
    std::ostringstream csv;
    write_summary_csv(csv, summary, meta);
    std::string path = detail::out_path(cfg, "summary.csv");
    write_text_file(path, csv.str());
    log << "wrote " << path << "\n";
  }
  if (cfg.output.write_json) {
    std::string path = detail::out_path(cfg, "summary.json");
    write_text_file(path, summary_json(summary, meta).dump(2) + "\n");
    log << "wrote " << path << "\n";
    std::string ref_path = detail::out_path(cfg, "reference.json");
    write_text_file(ref_path,
                    reference_json(summary.reference, meta).dump(2) + "\n");
    log << "wrote " << ref_path << "\n";
  }
  return 0;
}

inline int cmd_bias_scan(const RunConfig& cfg, std::ostream& log) {
  if (cfg.experiment.theta_list.empty())
    throw ConfigError("bias-scan needs theta_list in [experiment]");
  std::shared_ptr<SaddleProblem> problem = make_problem(cfg.problem);
  ReferencePoint ref = detail::reference_for(cfg, *problem);
  StationarySettings st = make_stationary(cfg.experiment);

  BiasTable table = bias_scan(*problem, cfg.experiment.theta_list,
                              cfg.experiment.vr_pair, ref, st);
  MetaList meta = standard_meta(cfg);

  for (const BiasRow& r : table.rows)
    log << "theta=" << format_double(r.theta)
        << " bias=" << format_double(r.bias)
        << " se=" << format_double(r.se) << "\n";
  log << "slope=" << format_double(table.slope) << "\n";
  if (table.has_vr)
    log << "vr(" << format_double(table.vr_theta1) << ","
        << format_double(table.vr_theta2)
        << "): bias=" << format_double(table.vr_bias)
        << " se=" << format_double(table.vr_se) << "\n";

  if (cfg.output.write_csv) {
    std::ostringstream csv;
    write_bias_csv(csv, table, meta);
    std::string path = detail::out_path(cfg, "bias.csv");
    write_text_file(path, csv.str());
    log << "wrote " << path << "\n";
  }
  if (cfg.output.write_json) {
    std::string path = detail::out_path(cfg, "bias.json");
    write_text_file(path, bias_json(table, meta).dump(2) + "\n");
    log << "wrote " << path << "\n";
  }
  return 0;
}

inline int cmd_reference(const RunConfig& cfg, std::ostream& log) {
  std::shared_ptr<SaddleProblem> problem = make_problem(cfg.problem);
  ReferenceOptions opt;
  opt.tol_rel = cfg.experiment.tol_rel;
  opt.residual_tol = cfg.experiment.residual_tol;
  opt.theta_floor = cfg.experiment.theta_floor;
  opt.max_iters = cfg.experiment.max_ref_iters;
  ReferencePoint ref = reference_solution(*problem, opt);
  log << "iters=" << ref.iters
      << " residual=" << format_double(ref.residual) << "\n";
  std::string path = detail::out_path(cfg, "reference.json");
  write_text_file(path,
                  reference_json(ref, standard_meta(cfg)).dump(2) + "\n");
  log << "wrote " << path << "\n";
  return 0;
}

/// Maps exceptions to process exit codes: 2 for configuration problems,
/// 3 for numerical failures (including anything unexpected).
template <typename F>
int run_cli_action(F&& f, std::ostream& err = std::cerr) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace sapd
