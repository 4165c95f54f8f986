#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "sapd/projections.hpp"
#include "sapd/rng.hpp"

using Catch::Approx;
using namespace sapd;

TEST_CASE("ball projection", "[projections]") {
  Eigen::Vector2d v(3.0, 4.0);
  Eigen::VectorXd p = project_ball(v, 1.0);
  REQUIRE(p[0] == Approx(0.6));
  REQUIRE(p[1] == Approx(0.8));

  Eigen::Vector2d inside(0.1, 0.2);
  REQUIRE(project_ball(inside, 1.0).isApprox(inside));

  RngStream rng(5);
  Eigen::VectorXd x(6);
  rng.fill_gaussian(x);
  x *= 10.0 / x.norm();
  REQUIRE(project_ball(x, 4.0).norm() == Approx(2.0));

  REQUIRE_THROWS_AS(project_ball(v, -1.0), std::invalid_argument);
}

TEST_CASE("simplex projection", "[projections]") {
  Eigen::Vector3d a(0.5, 0.5, 2.0);
  Eigen::VectorXd pa = project_simplex(a);
  REQUIRE(pa[0] == Approx(0.0).margin(1e-12));
  REQUIRE(pa[1] == Approx(0.0).margin(1e-12));
  REQUIRE(pa[2] == Approx(1.0));

  Eigen::Vector3d on(0.2, 0.3, 0.5);
  REQUIRE(project_simplex(on).isApprox(on, 1e-12));

  Eigen::Vector2d b(2.0, -1.0);
  Eigen::VectorXd pb = project_simplex(b);
  REQUIRE(pb[0] == Approx(1.0));
  REQUIRE(pb[1] == Approx(0.0).margin(1e-12));

  SECTION("always lands on the simplex") {
    RngStream rng(77);
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd v(1 + static_cast<int>(rng.integer_below(6)));
      rng.fill_gaussian(v);
      v *= 3.0;
      Eigen::VectorXd p = project_simplex(v);
      REQUIRE(p.minCoeff() >= 0.0);
      REQUIRE(p.sum() == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("uncertainty set projection on pinned cases", "[projections]") {
  SECTION("center is a fixed point") {
    UncertaintySet set{4, 2.0 * std::sqrt(4.0)};
    Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.25);
    REQUIRE((project_uncertainty(u, set) - u).norm() < 1e-10);
  }
  SECTION("ball active, nonnegativity inactive") {
    UncertaintySet set{2, 1.0};
    Eigen::Vector2d v(1.0, 0.0);
    Eigen::VectorXd p = project_uncertainty(v, set);
    REQUIRE(p[0] == Approx(0.853553).epsilon(1e-5));
    REQUIRE(p[1] == Approx(0.146447).epsilon(1e-4));
  }
  SECTION("large budget reduces to the simplex") {
    // max simplex distance^2 to uniform is 0.5 < r/n^2 = 1
    UncertaintySet set{2, 4.0};
    Eigen::Vector2d v(2.0, -1.0);
    Eigen::VectorXd p = project_uncertainty(v, set);
    REQUIRE(p[0] == Approx(1.0));
    REQUIRE(p[1] == Approx(0.0).margin(1e-9));
  }
  SECTION("set validation") {
    UncertaintySet bad{0, 1.0};
    Eigen::VectorXd v(1);
    v << 1.0;
    REQUIRE_THROWS_AS(project_uncertainty(v, bad), std::invalid_argument);
  }
}

TEST_CASE("uncertainty projection matches the enumeration oracle",
          "[projections][property]") {
  RngStream rng(313);
  for (int t = 0; t < 60; ++t) {
    int n = 2 + static_cast<int>(rng.integer_below(4));  // n in [2, 5]
    double r = 0.3 + 3.0 * rng.uniform();
    UncertaintySet set{n, r};
    Eigen::VectorXd v(n);
    rng.fill_gaussian(v);
    v *= 1.5;
    Eigen::VectorXd got = project_uncertainty(v, set);
    Eigen::VectorXd want = oracles::project_uncertainty_enum(v, r);
    INFO("t=" << t << " n=" << n << " r=" << r);
    REQUIRE((got - want).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("projection properties", "[projections][property]") {
  RngStream rng(99);
  UncertaintySet set{5, 2.0 * std::sqrt(5.0)};

  SECTION("idempotence") {
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd v(5);
      rng.fill_gaussian(v);
      Eigen::VectorXd p = project_uncertainty(v, set);
      Eigen::VectorXd pp = project_uncertainty(p, set);
      REQUIRE((p - pp).norm() <= 2.0 * set.tol + 1e-12);
    }
  }
  SECTION("non-expansiveness") {
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd u(5), v(5);
      rng.fill_gaussian(u);
      rng.fill_gaussian(v);
      double lhs = (project_uncertainty(u, set) - project_uncertainty(v, set))
                       .norm();
      REQUIRE(lhs <= (u - v).norm() + 4.0 * set.tol);
    }
  }
  SECTION("membership within ten times the tolerance") {
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd v(5);
      rng.fill_gaussian(v);
      v *= 4.0;
      REQUIRE(set.contains(project_uncertainty(v, set), 10.0 * set.tol));
    }
  }
  SECTION("variational inequality against feasible points") {
    Eigen::VectorXd v(5);
    rng.fill_gaussian(v);
    v *= 2.0;
    Eigen::VectorXd p = project_uncertainty(v, set);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd q(5);
      rng.fill_gaussian(q);
      q = project_uncertainty(q, set);
      REQUIRE((v - p).dot(q - p) <= 1e-8);
    }
  }
}

TEST_CASE("constraint handles", "[projections]") {
  SECTION("ball handle") {
    BallConstraint ball(4.0);
    Eigen::VectorXd v(2);
    v << 3.0, 4.0;
    REQUIRE_FALSE(ball.contains(v, 1e-12));
    ball.project(v);
    REQUIRE(v.norm() == Approx(2.0));
    REQUIRE(ball.contains(v, 1e-12));
  }
  SECTION("uncertainty handle") {
    UncertaintyConstraint pr(UncertaintySet{3, 2.0 * std::sqrt(3.0)});
    Eigen::VectorXd v(3);
    v << 5.0, -2.0, 0.5;
    REQUIRE_FALSE(pr.contains(v, 1e-9));
    pr.project(v);
    REQUIRE(pr.contains(v, 1e-9));
  }
  SECTION("invalid ball radius is rejected at construction") {
    REQUIRE_THROWS_AS(BallConstraint(-1.0), std::invalid_argument);
  }
}
