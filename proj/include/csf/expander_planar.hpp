#pragma once

#include "csf/shrinker_planar.hpp"

namespace csf {

/// Integrates the expander radial ODE alpha'' = -(alpha')^2/2 + 2 alpha + 2
/// from (alpha0, dalpha0) over [0, t_span]. With dalpha0 = 0 the solution
/// has a single minimum at t = 0 and grows without bound on both sides.
AlphaSolution solve_alpha_expander(double alpha0, double dalpha0, double t_span,
                                   const IntegrationSettings& settings = {});

/// Polar reconstruction of the expander; throws DomainError where
/// 1 - u'^2 < -1e-10 (the radial speed cannot exceed arc-length speed).
PolarCurve reconstruct_expander(const AlphaSolution& alpha, double theta0, int orientation,
                                int n_samples, const IntegrationSettings& settings = {});

/// Per-sample ||d2 - (pos - <pos,d1> d1)||: deviation from the expander
/// equation gamma'' = gamma - <gamma,gamma'> gamma'.
ResidualReport expander_residual(const CurveSample& curve);

}  // namespace csf
