#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csf/core_geometry.hpp"
#include "csf/ode_engine.hpp"

namespace csf {

/// Dense solution of the radial ODE for alpha = <gamma, gamma>.
/// Shrinkers obey alpha'' = (alpha')^2/2 - 2 alpha + 2, expanders
/// alpha'' = -(alpha')^2/2 + 2 alpha + 2; alpha stays positive on the span.
struct AlphaSolution {
  SolitonKind kind = SolitonKind::shrinker;
  double alpha0 = 0.0;
  double dalpha0 = 0.0;
  IvpSolution solution;  // state (alpha, alpha')
  std::optional<double> period;  // first return of (alpha, alpha') to its start

  double alpha_at(double t) const { return solution.interpolate(t)(0); }
  double dalpha_at(double t) const { return solution.interpolate(t)(1); }
};

/// Angle along the curve; evaluated from the jointly integrated
/// (alpha, alpha', theta) trajectory.
struct ThetaFn {
  std::shared_ptr<const IvpSolution> joint;  // state (alpha, alpha', theta)

  double operator()(double t) const { return joint->interpolate(t)(2); }
  double t_begin() const { return joint->t_begin(); }
  double t_end() const { return joint->t_end(); }
};

/// Curve reconstructed from the polar reduction
/// gamma(t) = sqrt(alpha(t)) (cos theta(t), sin theta(t)).
struct PolarCurve {
  AlphaSolution alpha;
  ThetaFn theta;
  double theta0 = 0.0;
  int orientation = +1;  // sign branch of theta'
  CurveSample samples;
};

/// Closure diagnostics of one radial period: the angle delta_theta swept per
/// period, its ratio to a full turn, and how close q periods come to an
/// integer number of turns for q <= q_max.
struct ClosureReport {
  double alpha0 = 0.0;
  std::optional<double> period;
  std::optional<double> delta_theta;
  std::optional<double> rotation_ratio;
  std::optional<double> closure_gap;
  std::optional<int> best_p;
  std::optional<int> best_q;
  bool closed = false;
  bool failed = false;
  std::string failure;
};

struct ClosureScan {
  std::vector<ClosureReport> reports;
  bool rotation_ratio_monotone = false;
  int n_failed = 0;
};

/// Max-norm and per-sample residuals of a pointwise equation over a curve.
struct ResidualReport {
  std::string equation;
  Vec per_sample;
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

// Tolerances used to declare a reconstructed curve numerically closed.
inline constexpr double kClosureGapTol = 1e-6;
inline constexpr double kClosureEndpointTol = 1e-5;  // times the curve diameter
inline constexpr double kPeriodStateTol = 1e-8;

/// Integrates the shrinker radial ODE from (alpha0, dalpha0) over [0, t_span]
/// with zero-crossing events on alpha'. Throws PositivityError if alpha
/// reaches zero. The constant solution alpha == 1 reports no period.
AlphaSolution solve_alpha_shrinker(double alpha0, double dalpha0, double t_span,
                                   const IntegrationSettings& settings = {});

/// theta with theta(t0) = theta0, integrated jointly with alpha through
/// theta' = orientation * sqrt(4 alpha - alpha'^2) / (2 alpha)
/// (equivalently theta'^2 = (1 - u'^2)/u^2 for u = sqrt(alpha), the positive
/// branch picked by orientation = +1).
ThetaFn theta_from_alpha(const AlphaSolution& alpha, double theta0, int orientation,
                         const IntegrationSettings& settings = {});

/// Samples gamma, gamma', gamma'' on a uniform grid over the alpha span.
PolarCurve reconstruct_shrinker(const AlphaSolution& alpha, double theta0, int orientation,
                                int n_samples, const IntegrationSettings& settings = {});

/// max |theta'^2 u^2 + u'^2 - 1| over the sample grid (unit-speed constraint
/// of the polar reduction).
double polar_constraint_residual(const PolarCurve& curve);

/// Per-sample ||d2 - (<pos,d1> d1 - pos)||: deviation from the shrinker
/// equation gamma'' = <gamma,gamma'> gamma' - gamma.
ResidualReport shrinker_residual(const CurveSample& curve);

/// Closure diagnostics for one starting value alpha(0) = alpha0, alpha'(0)=0.
ClosureReport closure_report(double alpha0, int q_max,
                             const IntegrationSettings& settings = {});

/// Grid scan over alpha0 in [from, to] subset of (0, 1); failed grid points
/// are reported and skipped. Also reports whether rotation_ratio is strictly
/// monotone across the grid (the precondition for bisection refinement).
ClosureScan closure_scan(double from, double to, int n_grid, int q_max,
                         const IntegrationSettings& settings = {});

/// Bisects alpha0 inside [a_lo, a_hi] until rotation_ratio hits p/q within
/// ratio_tol. The target must be bracketed by the endpoint ratios; on a
/// non-monotone range pass a bracketed subinterval from a scan.
double refine_rotation_ratio(int p, int q, double a_lo, double a_hi,
                             const IntegrationSettings& settings = {},
                             double ratio_tol = 1e-10);

}  // namespace csf
