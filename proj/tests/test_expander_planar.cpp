#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "csf/core_geometry.hpp"
#include "csf/expander_planar.hpp"

using namespace csf;

namespace {

// Frozen from the fixed-step RK4 oracle with 1e6 steps.
constexpr double kExpanderAlphaAt5From05 = 28.8715963558723;

IvpSolution oracle_expander(double a0, double da0, double t_end, long steps) {
  IvpProblem p;
  p.dimension = 2;
  p.y0 = Vec(2);
  p.y0 << a0, da0;
  p.t_end = t_end;
  p.rhs = [](double, const Vec& y, Vec& dy) {
    dy(0) = y(1);
    dy(1) = -0.5 * y(1) * y(1) + 2.0 * y(0) + 2.0;
  };
  return integrate_fixed(p, steps);
}

}  // namespace

TEST_CASE("no expander equilibrium exists: alpha grows at once") {
  // alpha'' = 2 alpha + 2 > 0 at every critical point with alpha > 0, so
  // a rest point would need alpha = -1.
  AlphaSolution sol = solve_alpha_expander(1.0, 0.0, 5.0);
  CHECK(sol.alpha_at(1e-3) > 1.0);
  double prev = 1.0;
  for (int i = 1; i <= 50; ++i) {
    const double a = sol.alpha_at(5.0 * i / 50.0);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("expander trajectory matches the fixed-step oracle") {
  AlphaSolution sol = solve_alpha_expander(0.5, 0.0, 5.0);
  CHECK(sol.alpha_at(5.0) == doctest::Approx(kExpanderAlphaAt5From05).epsilon(1e-9));
  IvpSolution oracle = oracle_expander(0.5, 0.0, 5.0, 1'000'000);
  CHECK(std::abs(sol.alpha_at(5.0) - oracle.states.back()(0)) < 1e-7);
}

TEST_CASE("positivity holds on both time directions") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uni(0.05, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a0 = uni(rng);
    for (double span : {10.0, -10.0}) {
      AlphaSolution sol = solve_alpha_expander(a0, 0.0, span);
      double min_alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 20000; ++i) {
        min_alpha = std::min(min_alpha, sol.alpha_at(span * i / 20000.0));
      }
      CHECK(min_alpha > 0.0);
      CHECK(std::abs(min_alpha - a0) < 1e-6);
    }
  }
}

TEST_CASE("expander curves leave every ball") {
  for (double a0 : {0.1, 0.5, 2.0, 5.0}) {
    AlphaSolution sol = solve_alpha_expander(a0, 0.0, 5.0);
    CHECK(std::sqrt(sol.alpha_at(5.0)) >= 2.0 * std::sqrt(a0));
  }
}

TEST_CASE("expander reconstruction satisfies its defining equation") {
  AlphaSolution sol = solve_alpha_expander(0.5, 0.0, 5.0);
  PolarCurve curve = reconstruct_expander(sol, 0.0, +1, 1501);
  CHECK(expander_residual(curve.samples).max_residual < 1e-7);
  CHECK(arc_length_defect(curve.samples) < 1e-7);
  CHECK(polar_constraint_residual(curve) < 1e-8);

  PolarCurve mirror = reconstruct_expander(sol, 0.0, -1, 1501);
  for (Eigen::Index i = 0; i < curve.samples.size(); i += 150) {
    CHECK(curve.samples.positions(0, i) ==
          doctest::Approx(mirror.samples.positions(0, i)).epsilon(1e-9));
    CHECK(curve.samples.positions(1, i) ==
          doctest::Approx(-mirror.samples.positions(1, i)).epsilon(1e-9));
  }
}

TEST_CASE("reconstruction works on backward spans") {
  AlphaSolution sol = solve_alpha_expander(0.7, 0.0, -4.0);
  PolarCurve curve = reconstruct_expander(sol, 0.2, +1, 801);
  CHECK(curve.samples.params(0) == -4.0);
  CHECK(curve.samples.params(curve.samples.size() - 1) == 0.0);
  CHECK(expander_residual(curve.samples).max_residual < 1e-7);
  CHECK(arc_length_defect(curve.samples) < 1e-7);
}

TEST_CASE("expander residual on known curves") {
  Vec dir(2);
  dir << 1.0, -1.0;
  CurveSample line = line_curve(dir, Vec::LinSpaced(21, -3.0, 3.0));
  CHECK(expander_residual(line).max_residual < 1e-14);

  // Unit circle: d2 = -gamma but gamma_perp = +gamma, residual exactly 2.
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
  CHECK(expander_residual(circle).max_residual == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("radial speed above arc-length speed is a domain error") {
  // alpha'(0)^2 > 4 alpha(0) means |u'| > 1 from the start.
  AlphaSolution sol = solve_alpha_expander(0.25, 1.5, 2.0);
  CHECK_THROWS_AS(reconstruct_expander(sol, 0.0, +1, 64), DomainError);
}

TEST_CASE("kind mismatches are rejected") {
  AlphaSolution sol = solve_alpha_expander(0.5, 0.0, 2.0);
  CHECK_THROWS_AS(reconstruct_shrinker(sol, 0.0, +1, 64), InvalidInput);
}
