#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "csf/core_geometry.hpp"
#include "csf/shrinker_planar.hpp"

using namespace csf;

namespace {

// Regression constants frozen from the fixed-step RK4 oracle
// (1e6 steps, Hermite-refined zero crossings; see oracle helpers below).
constexpr double kPeriod06 = 4.484007073383;
constexpr double kDeltaTheta06 = 4.42239300394025;
constexpr double kRatio06 = 0.703845706872564;

IvpSolution oracle_alpha(double a0, double da0, double t_end, long steps) {
  IvpProblem p;
  p.dimension = 2;
  p.y0 = Vec(2);
  p.y0 << a0, da0;
  p.t_end = t_end;
  p.rhs = [](double, const Vec& y, Vec& dy) {
    dy(0) = y(1);
    dy(1) = 0.5 * y(1) * y(1) - 2.0 * y(0) + 2.0;
  };
  return integrate_fixed(p, steps);
}

// Period from the fixed-step trajectory: first rising zero of alpha'
// returning near alpha0, refined by bisection on the dense output.
double oracle_period(double a0) {
  IvpSolution sol = oracle_alpha(a0, 0.0, 8.0, 1'000'000);
  for (std::size_t i = 1; i + 1 < sol.times.size(); ++i) {
    if (sol.states[i](1) < 0.0 && sol.states[i + 1](1) >= 0.0 &&
        std::abs(sol.states[i](0) - a0) < 1e-2) {
      double ta = sol.times[i], tb = sol.times[i + 1];
      for (int it = 0; it < 100; ++it) {
        const double tm = 0.5 * (ta + tb);
        if (sol.interpolate(tm)(1) < 0.0) ta = tm; else tb = tm;
      }
      return 0.5 * (ta + tb);
    }
  }
  return -1.0;
}

}  // namespace

TEST_CASE("circle equilibrium: alpha stays exactly one, no period") {
  AlphaSolution sol = solve_alpha_shrinker(1.0, 0.0, 20.0);
  CHECK(!sol.period.has_value());
  for (double t : {0.0, 1.7, 8.83, 20.0}) {
    CHECK(sol.alpha_at(t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(sol.dalpha_at(t)) < 1e-14);
  }
}

TEST_CASE("alpha0 = 0.6 trajectory: positivity, minimum, period") {
  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.0, 20.0);
  REQUIRE(sol.period.has_value());
  CHECK(*sol.period == doctest::Approx(kPeriod06).epsilon(1e-9));
  CHECK(*sol.period == doctest::Approx(oracle_period(0.6)).epsilon(1e-8));

  double min_alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40000; ++i) {
    min_alpha = std::min(min_alpha, sol.alpha_at(20.0 * i / 40000.0));
  }
  CHECK(min_alpha > 0.0);
  CHECK(std::abs(min_alpha - 0.6) < 1e-6);
}

TEST_CASE("trajectory is symmetric about its critical times") {
  AlphaSolution sol = solve_alpha_shrinker(0.37, 0.0, 20.0);
  REQUIRE(sol.period.has_value());
  const double t0 = 0.5 * *sol.period;  // first maximum
  CHECK(std::abs(sol.dalpha_at(t0)) < 1e-8);
  for (int i = 1; i <= 40; ++i) {
    const double dt = t0 * i / 40.0;
    CHECK(std::abs(sol.alpha_at(t0 + dt) - sol.alpha_at(t0 - dt)) < 1e-7);
  }
}

TEST_CASE("positivity violations carry the crossing time") {
  // alpha'(0)^2 > 4 alpha(0) cannot come from a curve; driven downward the
  // trajectory crosses zero.
  try {
    solve_alpha_shrinker(0.5, -2.0, 10.0);
    FAIL("expected PositivityError");
  } catch (const PositivityError& e) {
    CHECK(e.crossing_time() > 0.0);
    CHECK(e.crossing_time() < 10.0);
  }
}

TEST_CASE("period detection also works away from critical starts") {
  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.5, 30.0);
  REQUIRE(sol.period.has_value());
  const double T = *sol.period;
  // The orbit through (0.6, 0.5) has a lower minimum than 0.6 and a slightly
  // different period; the state must return after T.
  const double t_ref = 1.0;
  CHECK(std::abs(sol.alpha_at(t_ref + T) - sol.alpha_at(t_ref)) < 1e-7);
  CHECK(std::abs(sol.dalpha_at(t_ref + T) - sol.dalpha_at(t_ref)) < 1e-7);
}

TEST_CASE("minimum over five periods equals alpha0 (sampled starts)") {
  std::mt19937 rng(20260810);
  std::uniform_real_distribution<double> uni(0.06, 0.94);
  for (int trial = 0; trial < 10; ++trial) {
    const double a0 = uni(rng);
    AlphaSolution sol = solve_alpha_shrinker(a0, 0.0, 40.0);
    REQUIRE(sol.period.has_value());
    const double span = 5.0 * *sol.period;
    REQUIRE(span < 40.0);
    double min_alpha = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 50000; ++i) {
      min_alpha = std::min(min_alpha, sol.alpha_at(span * i / 50000.0));
    }
    CHECK(min_alpha >= a0 - 1e-6);
    CHECK(std::abs(min_alpha - a0) < 1e-6);
  }
}

TEST_CASE("radial ODE residual by finite differences") {
  AlphaSolution sol = solve_alpha_shrinker(0.42, 0.0, 12.0);
  const double h = 5e-3;
  auto fd4 = [h](auto&& f, double t) {
    return (-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12.0 * h);
  };
  auto a_of = [&](double t) { return sol.alpha_at(t); };
  auto da_of = [&](double t) { return sol.dalpha_at(t); };
  for (int i = 1; i <= 60; ++i) {
    const double t = 0.19 * i;
    const double a = sol.alpha_at(t);
    const double ap = sol.dalpha_at(t);
    CHECK(std::abs(fd4(a_of, t) - ap) < 1e-6);
    CHECK(std::abs(fd4(da_of, t) - 0.5 * ap * ap + 2.0 * a - 2.0) < 1e-6);
  }
}

TEST_CASE("theta on the circle advances linearly") {
  AlphaSolution sol = solve_alpha_shrinker(1.0, 0.0, 10.0);
  ThetaFn plus = theta_from_alpha(sol, 0.3, +1);
  ThetaFn minus = theta_from_alpha(sol, 0.3, -1);
  for (double t : {0.0, 0.5, 3.3, 10.0}) {
    CHECK(std::abs(plus(t) - (0.3 + t)) < 1e-12);
    CHECK(std::abs(minus(t) - (0.3 - t)) < 1e-12);
  }
}

TEST_CASE("orientation -1 mirrors the angle") {
  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.0, 12.0);
  ThetaFn plus = theta_from_alpha(sol, 1.1, +1);
  ThetaFn minus = theta_from_alpha(sol, 1.1, -1);
  for (double t : {0.7, 4.0, 11.5}) {
    CHECK(std::abs((minus(t) - 1.1) + (plus(t) - 1.1)) < 1e-10);
  }
}

TEST_CASE("joint theta matches quadrature of the angular speed") {
  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.0, 20.0);
  REQUIRE(sol.period.has_value());
  const double T = *sol.period;
  ThetaFn theta = theta_from_alpha(sol, 0.0, +1);

  // Simpson quadrature of theta' = sqrt(4 alpha - alpha'^2)/(2 alpha)
  // sampled from the dense radial solution.
  const long n = 200'000;
  const double h = T / n;
  auto integrand = [&](double t) {
    const Vec y = sol.solution.interpolate(t);
    return std::sqrt(std::max(0.0, 4.0 * y(0) - y(1) * y(1))) / (2.0 * y(0));
  };
  double sum = integrand(0.0) + integrand(T);
  for (long i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
  const double quad = sum * h / 3.0;

  const double joint = theta(T) - theta(0.0);
  CHECK(std::abs(joint - quad) < 1e-7);
  CHECK(joint == doctest::Approx(kDeltaTheta06).epsilon(1e-8));
}

TEST_CASE("reconstruction of the circle") {
  AlphaSolution sol = solve_alpha_shrinker(1.0, 0.0, 2.0 * std::numbers::pi);
  PolarCurve curve = reconstruct_shrinker(sol, 0.0, +1, 128);
  for (Eigen::Index i = 0; i < curve.samples.size(); ++i) {
    const double t = curve.samples.params(i);
    Eigen::Vector2d expect(std::cos(t), std::sin(t));
    CHECK((curve.samples.positions.col(i) - expect).norm() < 1e-12);
    CHECK((curve.samples.d2.col(i) + curve.samples.positions.col(i)).norm() < 1e-12);
  }
  CHECK(shrinker_residual(curve.samples).max_residual < 1e-12);
}

TEST_CASE("reconstruction of the alpha0 = 0.6 curve") {
  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.0, 20.0);
  PolarCurve curve = reconstruct_shrinker(sol, 0.0, +1, 2001);

  double max_alpha = 0.0;
  for (const Vec& y : sol.solution.states) max_alpha = std::max(max_alpha, y(0));

  for (Eigen::Index i = 0; i < curve.samples.size(); ++i) {
    const double r = curve.samples.positions.col(i).norm();
    CHECK(r >= std::sqrt(0.6) - 1e-6);
    CHECK(r <= std::sqrt(max_alpha) + 1e-6);
  }
  CHECK(shrinker_residual(curve.samples).max_residual < 1e-7);
  CHECK(arc_length_defect(curve.samples) < 1e-7);
  CHECK(polar_constraint_residual(curve) < 1e-8);

  // Mirror curve: same radii, reflected angles.
  PolarCurve mirror = reconstruct_shrinker(sol, 0.0, -1, 2001);
  for (Eigen::Index i = 0; i < curve.samples.size(); i += 100) {
    CHECK(curve.samples.positions.col(i).norm() ==
          doctest::Approx(mirror.samples.positions.col(i).norm()).epsilon(1e-10));
    CHECK(curve.samples.positions(1, i) ==
          doctest::Approx(-mirror.samples.positions(1, i)).epsilon(1e-9));
  }
}

TEST_CASE("every reconstruction satisfies the shrinker equation") {
  // Starts below, above, and away from the critical radius, plus a
  // mid-slope initial condition.
  const double starts[][2] = {{0.2, 0.0}, {0.8, 0.0}, {1.5, 0.0}, {0.7, 0.5}};
  for (const auto& s : starts) {
    AlphaSolution sol = solve_alpha_shrinker(s[0], s[1], 15.0);
    PolarCurve curve = reconstruct_shrinker(sol, 0.4, +1, 1501);
    CHECK(shrinker_residual(curve.samples).max_residual < 1e-7);
    CHECK(arc_length_defect(curve.samples) < 1e-7);
    CHECK(polar_constraint_residual(curve) < 1e-8);
    CHECK(std::abs(curve.theta(0.0) - 0.4) < 1e-13);
  }
}

TEST_CASE("shrinker residual on known curves") {
  // Unit circle: exact solution.
  const int n = 65;
  CurveSample circle;
  circle.params = Vec::LinSpaced(n, 0.0, 2.0 * std::numbers::pi);
  circle.positions.resize(2, n);
  circle.d1.resize(2, n);
  circle.d2.resize(2, n);
  for (int i = 0; i < n; ++i) {
    const double t = circle.params(i);
    circle.positions.col(i) << std::cos(t), std::sin(t);
    circle.d1.col(i) << -std::sin(t), std::cos(t);
    circle.d2.col(i) << -std::cos(t), -std::sin(t);
  }
  CHECK(shrinker_residual(circle).max_residual < 1e-14);

  // Straight line through the origin: the degenerate solution family.
  Vec dir(2);
  dir << 3.0, 4.0;
  CurveSample line = line_curve(dir, Vec::LinSpaced(33, -2.0, 2.0));
  CHECK(shrinker_residual(line).max_residual < 1e-14);

  // Circle of radius 2 is not a shrinker: d2 = -(1/2) radial unit while
  // <g,g'>g' - g = -2 radial unit, so the residual is exactly 3/2.
  CurveSample big;
  big.params = Vec::LinSpaced(n, 0.0, 4.0 * std::numbers::pi);
  big.positions.resize(2, n);
  big.d1.resize(2, n);
  big.d2.resize(2, n);
  for (int i = 0; i < n; ++i) {
    const double t = big.params(i) / 2.0;
    big.positions.col(i) << 2.0 * std::cos(t), 2.0 * std::sin(t);
    big.d1.col(i) << -std::sin(t), std::cos(t);
    big.d2.col(i) << -0.5 * std::cos(t), -0.5 * std::sin(t);
  }
  ResidualReport rep = shrinker_residual(big);
  CHECK(rep.max_residual == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.rms_residual == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("rotation ratio near the circle approaches 1/sqrt(2)") {
  ClosureReport rep = closure_report(1.0 - 1e-6, 8);
  REQUIRE(rep.rotation_ratio.has_value());
  CHECK(std::abs(*rep.rotation_ratio - 1.0 / std::sqrt(2.0)) < 1e-4);
}

TEST_CASE("closure report for alpha0 = 0.6") {
  ClosureReport rep = closure_report(0.6, 8);
  REQUIRE(rep.rotation_ratio.has_value());
  CHECK(*rep.rotation_ratio > 0.5);
  CHECK(*rep.rotation_ratio < 1.0);
  CHECK(*rep.rotation_ratio == doctest::Approx(kRatio06).epsilon(1e-8));
  CHECK(*rep.period == doctest::Approx(kPeriod06).epsilon(1e-9));
  CHECK(!rep.closed);  // 0.6 is not a closed-curve start for q <= 8
}

TEST_CASE("circle start is trivially closed with no ratio") {
  ClosureReport rep = closure_report(1.0, 8);
  CHECK(rep.closed);
  CHECK(!rep.rotation_ratio.has_value());
  CHECK(!rep.period.has_value());
}

TEST_CASE("scan is monotone and bisection pins the 2/3 curve") {
  ClosureScan scan = closure_scan(0.3, 0.9, 13, 8);
  CHECK(scan.n_failed == 0);
  CHECK(scan.rotation_ratio_monotone);

  const double a_star = refine_rotation_ratio(2, 3, 0.05, 0.12);
  ClosureReport rep = closure_report(a_star, 8);
  REQUIRE(rep.rotation_ratio.has_value());
  CHECK(std::abs(*rep.rotation_ratio - 2.0 / 3.0) <= 1e-9);
  REQUIRE(rep.closure_gap.has_value());
  CHECK(*rep.closure_gap <= 1e-6);
  CHECK(rep.closed);
  CHECK(*rep.best_p == 2);
  CHECK(*rep.best_q == 3);
}

TEST_CASE("closure scan rejects ranges outside the positive regime") {
  CHECK_THROWS_AS(closure_scan(0.2, 1.0, 10, 8), InvalidInput);
  CHECK_THROWS_AS(closure_scan(-0.1, 0.5, 10, 8), InvalidInput);
}

TEST_CASE("precondition checks across the planar pipeline") {
  CHECK_THROWS_AS(solve_alpha_shrinker(0.0, 0.0, 10.0), InvalidInput);
  CHECK_THROWS_AS(solve_alpha_shrinker(-0.5, 0.0, 10.0), InvalidInput);
  CHECK_THROWS_AS(solve_alpha_shrinker(0.6, 0.0, 0.0), InvalidInput);

  AlphaSolution sol = solve_alpha_shrinker(0.6, 0.0, 5.0);
  CHECK_THROWS_AS(theta_from_alpha(sol, 0.0, 2), InvalidInput);
  CHECK_THROWS_AS(reconstruct_shrinker(sol, 0.0, +1, 15), InvalidInput);
  CHECK_THROWS_AS(closure_report(0.6, 0), InvalidInput);
  CHECK_THROWS_AS(refine_rotation_ratio(2, 3, 0.12, 0.05), InvalidInput);
}

TEST_CASE("starts above the critical radius are periodic too") {
  AlphaSolution sol = solve_alpha_shrinker(1.5, 0.0, 20.0);
  REQUIRE(sol.period.has_value());
  CHECK(std::abs(sol.alpha_at(*sol.period) - 1.5) < 1e-8);
  // Maximum start: the orbit dips below 1 and comes back.
  double min_alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20000; ++i) {
    min_alpha = std::min(min_alpha, sol.alpha_at(20.0 * i / 20000.0));
  }
  CHECK(min_alpha < 1.0);
  CHECK(min_alpha > 0.0);
}
