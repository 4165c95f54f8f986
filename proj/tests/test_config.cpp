#include <catch2/catch_amalgamated.hpp>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sapd/config.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using namespace sapd;

namespace {

const char* kFullConfig =
    "# experiment description\n"
    "[problem]\n"
    "kind = quadratic\n"
    "mu_x = 0.5\n"
    "mu_y = 2\n"
    "dim_x = 3\n"
    "dim_y = 2\n"
    "coupling = 0.25\n"
    "noise_sigma = 0.1\n"
    "\n"
    "[solver]\n"
    "kind = sapd\n"
    "theta = 0.9\n"
    "label = momentum\n"
    "\n"
    "[solver]\n"
    "kind = sgda\n"
    "eta = 0.05\n"
    "\n"
    "[experiment]\n"
    "num_paths = 4\n"
    "num_iters = 250\n"
    "stride = 5\n"
    "master_seed = 99\n"
    "threads = 2\n"
    "theta_list = 0.9, 0.95,0.99\n"
    "vr_pair = 0.95, 0.9\n"
    "\n"
    "[output]\n"
    "dir = results\n"
    "write_json = false\n";

}  // namespace

TEST_CASE("config parsing", "[config]") {
  SECTION("full file round trip") {
    RunConfig cfg = parse_config_text(kFullConfig);
    REQUIRE(cfg.problem.kind == ProblemKind::Quadratic);
    REQUIRE(cfg.problem.mu_x == Approx(0.5));
    REQUIRE(cfg.problem.mu_y == Approx(2.0));
    REQUIRE(cfg.problem.dim_x == 3);
    REQUIRE(cfg.problem.dim_y == 2);
    REQUIRE(cfg.problem.coupling == Approx(0.25));
    REQUIRE(cfg.problem.noise_sigma == Approx(0.1));

    REQUIRE(cfg.solvers.size() == 2);
    REQUIRE(cfg.solvers[0].kind == SolverKind::Sapd);
    REQUIRE(cfg.solvers[0].theta == Approx(0.9));
    REQUIRE(cfg.solvers[0].label == "momentum");
    REQUIRE(cfg.solvers[1].kind == SolverKind::Sgda);
    REQUIRE(cfg.solvers[1].eta == Approx(0.05));

    REQUIRE(cfg.experiment.num_paths == 4);
    REQUIRE(cfg.experiment.num_iters == 250);
    REQUIRE(cfg.experiment.stride == 5);
    REQUIRE(cfg.experiment.master_seed == 99);
    REQUIRE(cfg.experiment.threads == 2);
    REQUIRE(cfg.experiment.theta_list ==
            std::vector<double>{0.9, 0.95, 0.99});
    REQUIRE(cfg.experiment.vr_pair.has_value());
    REQUIRE(cfg.experiment.vr_pair->first == Approx(0.95));
    REQUIRE(cfg.experiment.vr_pair->second == Approx(0.9));

    REQUIRE(cfg.output.dir == "results");
    REQUIRE_FALSE(cfg.output.write_json);
    REQUIRE(cfg.output.write_csv);
  }
  SECTION("minimal file takes the documented defaults") {
    RunConfig cfg = parse_config_text("[problem]\nkind = logistic\n");
    REQUIRE(cfg.problem.kind == ProblemKind::Logistic);
    REQUIRE(cfg.problem.mu_x == Approx(1.0));
    REQUIRE(cfg.solvers.empty());
    REQUIRE(cfg.experiment.num_paths == 50);
    REQUIRE(cfg.experiment.master_seed == 1);
    REQUIRE(cfg.experiment.theta_list.empty());
    REQUIRE_FALSE(cfg.experiment.vr_pair.has_value());
    REQUIRE(cfg.output.dir == "out");
  }
  SECTION("comments and blank lines are skipped") {
    RunConfig cfg = parse_config_text(
        "; leading note\n\n[problem]\n# inner\nkind = quadratic\n");
    REQUIRE(cfg.problem.kind == ProblemKind::Quadratic);
  }
}

TEST_CASE("config parsing fails closed", "[config]") {
  auto bad = [](const std::string& text) { return parse_config_text(text); };

  SECTION("structure errors carry line numbers") {
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\n[mystery]\n"),
                        ContainsSubstring(":3: unknown section"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\nvolume = 11\n"),
                        ContainsSubstring(":3: unknown key 'volume'"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\nmu_x = 1\nmu_x = 2\n"),
                        ContainsSubstring(":4: duplicate key 'mu_x'"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\n[problem]\n"),
                        ContainsSubstring(":3: duplicate [problem]"));
    REQUIRE_THROWS_WITH(bad("kind = quadratic\n"),
                        ContainsSubstring(":1: key outside of any section"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind quadratic\n"),
                        ContainsSubstring(":2: expected key = value"));
    REQUIRE_THROWS_WITH(bad("[problem\nkind = quadratic\n"),
                        ContainsSubstring(":1: unterminated section"));
  }
  SECTION("value errors carry line numbers") {
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\nmu_x = fast\n"),
                        ContainsSubstring(":3: key 'mu_x': expected a number"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\ndim_x = 2.5\n"),
        ContainsSubstring(":3: key 'dim_x': expected an integer"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[experiment]\nmaster_seed = -4\n"),
        ContainsSubstring(":4: key 'master_seed': expected an unsigned"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\nwith_replacement = maybe\n"),
        ContainsSubstring(":3: key 'with_replacement': expected a boolean"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[experiment]\ntheta_list = 0.9,,\n"),
        ContainsSubstring("malformed number list"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[experiment]\nvr_pair = 0.9\n"),
        ContainsSubstring("vr_pair needs exactly two"));
  }
  SECTION("semantic errors") {
    REQUIRE_THROWS_WITH(bad(""), ContainsSubstring("missing [problem]"));
    REQUIRE_THROWS_WITH(bad("[problem]\nmu_x = 1\n"),
                        ContainsSubstring("needs a kind"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = cubic\n"),
                        ContainsSubstring("unknown problem kind 'cubic'"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = quadratic\n[solver]\ntheta = 0.9\n"),
                        ContainsSubstring("[solver] needs a kind"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[solver]\nkind = newton\n"),
        ContainsSubstring("unknown solver kind 'newton'"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[solver]\nkind = sapd\n"),
        ContainsSubstring("needs theta in (0, 1)"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[solver]\nkind = sapd\ntheta = 1.5\n"),
        ContainsSubstring("needs theta in (0, 1)"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[solver]\nkind = vr_sapd\n"
            "theta = 0.9\nvr_mode = median\n"),
        ContainsSubstring("unknown vr_mode"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = dro\nnormalize = zscore\n"),
                        ContainsSubstring("unknown normalize scheme"));
    REQUIRE_THROWS_WITH(bad("[problem]\nkind = dro\nformat = parquet\n"),
                        ContainsSubstring("unknown dataset format"));
    REQUIRE_THROWS_WITH(
        bad("[problem]\nkind = quadratic\n[experiment]\nnum_paths = 0\n"),
        ContainsSubstring("counts must be at least one"));
  }
  SECTION("missing config file") {
    REQUIRE_THROWS_AS(load_config("/nonexistent/sapd.ini"), ConfigError);
  }
}

TEST_CASE("canonical text and hash", "[config]") {
  RunConfig cfg = parse_config_text(kFullConfig);
  std::string canon = canonical_text(cfg);
  std::string hash = config_hash(cfg);
  REQUIRE(hash.size() == 16);

  SECTION("stable across reparses") {
    RunConfig again = parse_config_text(kFullConfig);
    REQUIRE(canonical_text(again) == canon);
    REQUIRE(config_hash(again) == hash);
  }
  SECTION("thread count and output location never change the hash") {
    RunConfig other = cfg;
    other.experiment.threads = 16;
    other.output.dir = "elsewhere";
    other.output.write_json = false;
    REQUIRE(canonical_text(other) == canon);
    REQUIRE(config_hash(other) == hash);
  }
  SECTION("every modelled knob is hashed") {
    RunConfig other = cfg;
    other.problem.mu_x = 0.75;
    REQUIRE(config_hash(other) != hash);

    other = cfg;
    other.solvers[0].theta = 0.95;
    REQUIRE(config_hash(other) != hash);

    other = cfg;
    other.experiment.master_seed = 100;
    REQUIRE(config_hash(other) != hash);
  }
}

TEST_CASE("problem construction from config", "[config]") {
  SECTION("quadratic with a diagonal coupling block") {
    ProblemConfig pc;
    pc.kind = ProblemKind::Quadratic;
    pc.mu_x = 0.5;
    pc.mu_y = 2.0;
    pc.dim_x = 3;
    pc.dim_y = 2;
    pc.coupling = 0.25;
    auto p = make_problem(pc);
    REQUIRE(std::string(p->name()) == "quadratic");
    REQUIRE(p->dim_x() == 3);
    REQUIRE(p->dim_y() == 2);
    REQUIRE(p->profile().mu_x == Approx(0.5));
    REQUIRE(p->profile().L_yx == Approx(0.25));
  }
  SECTION("quadratic with a random coupling at a pinned norm") {
    ProblemConfig pc;
    pc.kind = ProblemKind::Quadratic;
    pc.dim_x = 4;
    pc.dim_y = 3;
    pc.coupling_norm = 2.0;
    pc.problem_seed = 7;
    auto p = make_problem(pc);
    REQUIRE(p->profile().L_yx == Approx(2.0).epsilon(1e-6));

    // same seed reproduces the operator, another seed does not
    Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
    Eigen::VectorXd g1(3), g2(3);
    p->grad_y(x, y, g1);
    make_problem(pc)->grad_y(x, y, g2);
    REQUIRE((g1 - g2).norm() == 0.0);
    pc.problem_seed = 8;
    make_problem(pc)->grad_y(x, y, g2);
    REQUIRE((g1 - g2).norm() > 0.0);
  }
  SECTION("logistic") {
    ProblemConfig pc;
    pc.kind = ProblemKind::Logistic;
    pc.mu_x = 0.5;
    pc.coupling = 0.8;
    pc.mu_y = 1.0;
    auto p = make_problem(pc);
    REQUIRE(std::string(p->name()) == "logistic_perturbed");
    REQUIRE(p->dim_x() == 1);
  }
  SECTION("dro from a synthetic dataset") {
    ProblemConfig pc;
    pc.kind = ProblemKind::Dro;
    pc.format = "synthetic";
    pc.synthetic_n = 20;
    pc.synthetic_d = 3;
    pc.mu_x = 0.1;
    pc.mu_y = 5.0;
    pc.ball_radius = 3.0;
    pc.batch_size = 4;
    auto p = make_problem(pc);
    REQUIRE(std::string(p->name()) == "reg_dro");
    REQUIRE(p->dim_x() == 3);
    REQUIRE(p->dim_y() == 20);
    Eigen::VectorXd far = Eigen::VectorXd::Constant(3, 10.0);
    p->constraint_x()->project(far);
    REQUIRE(far.norm() == Approx(3.0));
  }
  SECTION("dro format inference from the file suffix") {
    auto path = std::filesystem::temp_directory_path() /
                ("sapd_cfg_" + std::to_string(::getpid()) + ".csv");
    {
      std::ofstream out(path);
      out << "f,label\n1,A\n2,B\n";
    }
    ProblemConfig pc;
    pc.kind = ProblemKind::Dro;
    pc.dataset = path.string();
    pc.mu_x = 0.1;
    pc.mu_y = 5.0;
    pc.batch_size = 1;
    auto p = make_problem(pc);
    REQUIRE(p->dim_y() == 2);
    std::filesystem::remove(path);
  }
  SECTION("dro without any source fails") {
    ProblemConfig pc;
    pc.kind = ProblemKind::Dro;
    REQUIRE_THROWS_AS(make_problem(pc), ConfigError);
  }
}

TEST_CASE("solver entries from config", "[config]") {
  CurvatureProfile prof;
  prof.mu_x = 1.0;
  prof.mu_y = 1.0;
  prof.L_xx = 1.0;
  prof.L_yx = 0.5;
  prof.L_yy = 1.0;

  SECTION("momentum solvers carry derived step sizes") {
    SolverConfig sc;
    sc.kind = SolverKind::Sapd;
    sc.theta = 0.9;
    SolverEntry e = make_entry(sc, prof);
    REQUIRE(e.spec.kind == SolverKind::Sapd);
    REQUIRE(e.spec.stochastic);
    REQUIRE(e.spec.params.theta == Approx(0.9));
    REQUIRE(e.spec.params.tau == Approx((1.0 - 0.9) / 0.9));
    REQUIRE(e.label == "sapd");
    REQUIRE_FALSE(e.vr.has_value());

    sc.kind = SolverKind::Apd;
    sc.label = "exact";
    e = make_entry(sc, prof);
    REQUIRE_FALSE(e.spec.stochastic);
    REQUIRE(e.label == "exact");
  }
  SECTION("variance reduction resolves its pairing") {
    SolverConfig sc;
    sc.kind = SolverKind::VrSapd;
    sc.theta = 0.95;
    sc.vr_mode = "raw";
    sc.couple_noise = true;
    SolverEntry e = make_entry(sc, prof);
    REQUIRE(e.vr.has_value());
    REQUIRE(e.vr->theta1 == Approx(0.95));
    REQUIRE(e.vr->resolved_theta2() == Approx(0.9));
    REQUIRE(e.vr->mode == ExtrapolationSpec::Mode::Raw);
    REQUIRE(e.vr->couple_noise);

    sc.theta = 0.4;  // default pairing leaves theta2 out of range
    REQUIRE_THROWS_AS(make_entry(sc, prof), std::invalid_argument);
  }
  SECTION("baselines keep their explicit eta") {
    SolverConfig sc;
    sc.kind = SolverKind::Smp;
    sc.eta = 0.125;
    SolverEntry e = make_entry(sc, prof);
    REQUIRE(e.spec.eta == Approx(0.125));
    REQUIRE(e.label == "smp");
  }
}

TEST_CASE("plans from config", "[config]") {
  RunConfig cfg = parse_config_text(kFullConfig);
  auto p = make_problem(cfg.problem);
  ExperimentPlan plan = make_plan(cfg, p);
  REQUIRE(plan.solvers.size() == 2);
  REQUIRE(plan.solvers[0].label == "momentum");
  REQUIRE(plan.num_paths == 4);
  REQUIRE(plan.num_iters == 250);
  REQUIRE(plan.stride == 5);
  REQUIRE(plan.master_seed == 99);
  REQUIRE(plan.threads == 2);
  REQUIRE(plan.ref_options.tol_rel == Approx(1e-4));

  StationarySettings st = make_stationary(cfg.experiment);
  REQUIRE(st.tail_len == 10000);
  REQUIRE(st.num_paths == 8);
  REQUIRE(st.batches_per_path == 20);
  REQUIRE(st.seed == 99);
  REQUIRE(st.threads == 2);
  REQUIRE(st.burn_in == -1);
}
