#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "sapd/params.hpp"
#include "sapd/rng.hpp"

using Catch::Approx;
using namespace sapd;

namespace {

CurvatureProfile profile(double mu_x, double mu_y, double L_xx, double L_yx,
                         double L_yy) {
  CurvatureProfile p;
  p.mu_x = mu_x;
  p.mu_y = mu_y;
  p.L_xx = L_xx;
  p.L_yx = L_yx;
  p.L_yy = L_yy;
  return p;
}

}  // namespace

TEST_CASE("momentum thresholds on pinned profiles", "[params]") {
  SECTION("pure primal curvature") {
    ThetaThresholds t = theta_thresholds(profile(1, 1, 1, 0, 0));
    REQUIRE(t.theta_hat_1 == Approx(0.5));
    REQUIRE(t.theta_hat_2 == 0.0);  // kappa_y = 0 limit
  }
  SECTION("coupling raises the primal threshold") {
    // kappa_x + 4 kappa_yx^2 = 4 + 4 = 8
    ThetaThresholds t = theta_thresholds(profile(1, 1, 4, 1, 0));
    REQUIRE(t.theta_hat_1 == Approx(8.0 / 9.0));
    REQUIRE(t.theta_hat_2 == 0.0);
  }
  SECTION("dual smoothness root at kappa_y = 1") {
    ThetaThresholds t = theta_thresholds(profile(1, 1, 1, 0, 1));
    REQUIRE(t.theta_hat_1 == Approx(0.5));
    REQUIRE(t.theta_hat_2 == Approx(0.815073).epsilon(1e-5));
    // It really is the positive root of t^2 + t(1+8k^2) - 8k^2 = 0.
    double t2 = t.theta_hat_2;
    REQUIRE(t2 * t2 + t2 * 9.0 - 8.0 == Approx(0.0).margin(1e-12));
  }
  SECTION("monotone in each condition number") {
    double base = theta_thresholds(profile(1, 1, 2, 1, 1)).theta_hat_1;
    REQUIRE(theta_thresholds(profile(1, 1, 3, 1, 1)).theta_hat_1 > base);
    REQUIRE(theta_thresholds(profile(1, 1, 2, 2, 1)).theta_hat_1 > base);
    double base2 = theta_thresholds(profile(1, 1, 2, 1, 1)).theta_hat_2;
    REQUIRE(theta_thresholds(profile(1, 1, 2, 1, 2)).theta_hat_2 > base2);
  }
  SECTION("invalid profiles are rejected") {
    REQUIRE_THROWS_AS(theta_thresholds(profile(-1, 1, 1, 0, 1)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(theta_thresholds(profile(1, 1, -1, 0, 1)),
                      std::invalid_argument);
  }
}

TEST_CASE("step sizes from the one-parameter rule", "[params]") {
  SECTION("strongly asymmetric moduli") {
    SapdParams s = params_from_theta(profile(0.01, 10, 0.01, 0, 10), 0.95);
    REQUIRE(s.tau == Approx(5.2631579).epsilon(1e-7));
    REQUIRE(s.sigma == Approx(0.0052632).epsilon(1e-4));
  }
  SECTION("unit moduli at theta one half") {
    SapdParams s = params_from_theta(profile(1, 1, 1, 0, 1), 0.5);
    REQUIRE(s.tau == Approx(1.0));
    REQUIRE(s.sigma == Approx(1.0));
    REQUIRE(s.alpha == Approx(0.25));
  }
  SECTION("steps vanish as theta approaches one") {
    SapdParams s = params_from_theta(profile(1, 1, 1, 0, 1), 0.999999);
    REQUIRE(s.tau < 2e-6);
    REQUIRE(s.sigma < 2e-6);
  }
  SECTION("alpha sigma stays in [0, 1)") {
    for (double th : {0.1, 0.5, 0.9, 0.999}) {
      SapdParams s = params_from_theta(profile(2, 3, 4, 1, 3), th);
      REQUIRE(s.alpha * s.sigma == Approx((1.0 - th) / 2.0));
      REQUIRE(s.alpha * s.sigma < 1.0);
    }
  }
  SECTION("theta outside the open interval is rejected") {
    CurvatureProfile p = profile(1, 1, 1, 0, 1);
    REQUIRE_THROWS_AS(params_from_theta(p, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(params_from_theta(p, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(params_from_theta(p, -0.1), std::invalid_argument);
  }
}

TEST_CASE("admissibility certificate on pinned cases", "[params]") {
  CurvatureProfile p = profile(1, 1, 1, 0, 0);
  SECTION("diagonal certificate at theta 0.9") {
    // tau = sigma = 1/9, so the matrix is diag(8, 9 - 0.45, 0.45/0.9).
    SapdParams s = params_from_theta(p, 0.9);
    CertificateReport r = check_admissibility(p, s);
    REQUIRE(r.pass);
    REQUIRE(r.min_eig_full == Approx(0.5));
    REQUIRE(r.scalar_slack == Approx(0.0).margin(1e-12));
    REQUIRE(r.scalar_ok);
  }
  SECTION("scalar condition is tight by construction") {
    SapdParams s = params_from_theta(p, 0.5);
    CertificateReport r = check_admissibility(p, s);
    REQUIRE(r.scalar_slack == Approx(0.0).margin(1e-12));
  }
  SECTION("zero diagonal with live coupling fails") {
    CurvatureProfile q = profile(1, 1, 1, 10, 0);
    SapdParams s;
    s.theta = 0.9;
    s.tau = 1.0 / q.L_xx;  // makes the (0,0) entry exactly zero
    s.sigma = 0.1;
    s.alpha = 1.0;
    CertificateReport r = check_admissibility(q, s);
    REQUIRE_FALSE(r.pass);
    REQUIRE(r.min_eig_full < 0.0);
  }
  SECTION("report serializes every certificate field") {
    SapdParams s = params_from_theta(p, 0.9);
    nlohmann::json j = check_admissibility(p, s).to_json();
    for (const char* key : {"scalar_ok", "scalar_slack", "min_eig_full",
                            "min_eig_g1", "min_eig_g2", "pass"})
      REQUIRE(j.contains(key));
  }
}

TEST_CASE("certificate passes above threshold on random profiles",
          "[params][property]") {
  RngStream rng(20240817);
  for (int trial = 0; trial < 60; ++trial) {
    double mu_x = 0.05 + 2.0 * rng.uniform();
    double mu_y = 0.05 + 2.0 * rng.uniform();
    double kx = 1.0 + 49.0 * rng.uniform();
    double kyx = 3.0 * rng.uniform();
    double ky = 4.5 * rng.uniform();
    CurvatureProfile p = profile(mu_x, mu_y, kx * mu_x,
                                 kyx * std::sqrt(mu_x * mu_y), ky * mu_y);
    double th_hat = theta_thresholds(p).theta_hat();
    REQUIRE(th_hat < 0.995);  // generator caps keep the grid ordered
    for (double th : {th_hat, 0.5 * (th_hat + 0.99), 0.99}) {
      SapdParams s = params_from_theta(p, th);
      CertificateReport r = check_admissibility(p, s);
      INFO("trial " << trial << " theta " << th);
      REQUIRE(r.pass);
    }
  }
}

TEST_CASE("bound constants and mixing factor", "[params]") {
  CurvatureProfile p = profile(1, 1, 1, 0, 1);
  SECTION("pinned xi at theta one half") {
    // ((1-t)/t)(2 + 4 (2.25 + 0.25)) = 1 * 12
    BoundConstants b = bound_constants(p, params_from_theta(p, 0.5));
    REQUIRE(b.xi_tilde == Approx(12.0));
  }
  SECTION("zeta equals 2 theta over 1 + theta") {
    BoundConstants b = bound_constants(p, params_from_theta(p, 0.95));
    REQUIRE(b.zeta == Approx(1.9 / 1.95));
    for (double th : {0.1, 0.4, 0.7, 0.99}) {
      BoundConstants bb = bound_constants(p, params_from_theta(p, th));
      REQUIRE(bb.zeta == Approx(2.0 * th / (1.0 + th)));
      REQUIRE(bb.zeta < 1.0);
    }
  }
  SECTION("limits toward theta = 1") {
    BoundConstants b = bound_constants(p, params_from_theta(p, 0.9999));
    REQUIRE(b.xi_tilde < 0.004);
    REQUIRE(b.zeta > 0.9999);
  }
  SECTION("drift constant scales linearly in the noise level") {
    BoundConstants b = bound_constants(p, params_from_theta(p, 0.9));
    REQUIRE(b.drift_k(2.0) == Approx(2.0 * b.drift_k_unit));
  }
}

TEST_CASE("iterate bound endpoints and burn-in sizing", "[params]") {
  CurvatureProfile p = profile(1, 1, 1, 0, 1);
  SapdParams s = params_from_theta(p, 0.9);
  BoundConstants b = bound_constants(p, s);
  REQUIRE(lyapunov_bound(s, b, 0, 7.0, 0.01) == Approx(7.0));
  REQUIRE(lyapunov_bound(s, b, 4000, 7.0, 0.01) ==
          Approx(b.xi_tilde * 0.01).epsilon(1e-9));

  long long n = burn_in_for(b.zeta);
  REQUIRE(std::pow(b.zeta, static_cast<double>(n)) <= 1e-6);
  REQUIRE(std::pow(b.zeta, static_cast<double>(n - 1)) > 1e-6 * b.zeta);
  REQUIRE(burn_in_for(1.5) == 0);  // out-of-range zeta degrades to no burn-in
}
