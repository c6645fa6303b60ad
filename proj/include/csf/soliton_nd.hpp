#pragma once

#include <optional>
#include <vector>

#include "csf/core_geometry.hpp"
#include "csf/ode_engine.hpp"
#include "csf/shrinker_planar.hpp"

namespace csf {

struct SolitonSettings {
  IntegrationSettings integration;
  int n_samples = 801;
};

/// Initial data for direct integration of the soliton equation in R^n:
/// gamma(0) = p0, gamma'(0) = v0 with |v0| = 1.
struct SolitonSpec {
  SolitonKind kind = SolitonKind::shrinker;
  Eigen::Index dimension = 2;
  Vec p0;
  Vec v0;
  double t_span = 2.0 * 3.14159265358979323846;
  SolitonSettings settings;
};

/// Sampled (r, s) trajectory of the transport system whose solutions keep
/// v(t) = r gamma' + s gamma'' constant along a soliton.
struct RsTrajectory {
  double r0 = 0.0;
  double s0 = 0.0;
  Vec t;
  Vec r;
  Vec s;
  double v_drift = 0.0;  // max |v(t) - v(t_0)| for this trajectory
};

/// Numerical witnesses that a soliton curve lies in a plane.
struct PlanarityReport {
  std::vector<RsTrajectory> rs_solutions;  // canonical starts (1,0) and (0,1)
  double v_drift = 0.0;                    // max over both trajectories
  PlaneFit plane;
  double spanned_by_initial = 0.0;  // max dist(sample, span{p0, v0}) / (1 + |pos|)
  bool degenerate_line = false;     // gamma'' == 0 everywhere: straight line
};

/// Max-norm residuals of the spherical-frame equations for a shrinker in
/// R^3, plus the unit-speed constraint; samples too close to the origin or
/// the polar axis are skipped and counted.
struct SphericalResiduals {
  double res_radial = 0.0;
  double res_theta = 0.0;
  double res_phi = 0.0;
  double res_speed = 0.0;
  int skipped = 0;
};

/// Integrates gamma'' = -(gamma - <gamma,gamma'>gamma') for shrinkers and
/// gamma'' = +(gamma - <gamma,gamma'>gamma') for expanders as a first-order
/// system of size 2n; d2 of the returned samples is evaluated from the
/// right-hand side, not differentiated numerically.
CurveSample integrate_soliton(const SolitonSpec& spec);

/// Integrates the (r, s) system along the sampled curve for the two
/// canonical initial conditions and measures the drift of
/// v = r d1 + s d2 together with the best-fit plane of the samples.
/// Shrinkers use r' = s(<g,g> - <g,g'>^2), s' = -s<g,g'> - r; expanders use
/// the sign-adapted system r' = s(<g,g> - <g,g'>^2), s' = s<g,g'> - r that
/// follows from gamma''' = -|gamma''|^2 gamma' - <gamma,gamma'> gamma''.
PlanarityReport verify_planarity(const CurveSample& curve, SolitonKind kind,
                                 const IntegrationSettings& settings = {});

/// Finite-difference gamma''' against the closed-form identity
/// (shrinker: -|g''|^2 g' + <g,g'> g''; expander: -|g''|^2 g' - <g,g'> g'').
/// Needs a uniform parameter grid with at least 5 samples.
ResidualReport triple_derivative_check(const CurveSample& curve, SolitonKind kind);

/// Spherical-coordinate residual check for shrinker curves in R^3.
SphericalResiduals spherical_residuals(const CurveSample& curve);

}  // namespace csf
