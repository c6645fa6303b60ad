#pragma once

// Internals shared by the planar shrinker and expander pipelines. The two
// differ only in the sign pattern of the radial ODE and of the theta''
// recurrence, so everything is parameterized on SolitonKind.

#include "csf/shrinker_planar.hpp"

namespace csf::detail {

// alpha'' as a function of (alpha, alpha').
inline double alpha_accel(SolitonKind kind, double a, double da) {
  return kind == SolitonKind::shrinker ? 0.5 * da * da - 2.0 * a + 2.0
                                       : -0.5 * da * da + 2.0 * a + 2.0;
}

// 1 - u'^2 = (4 alpha - alpha'^2) / (4 alpha); values in [-1e-10, 0] are
// rounded up to 0, anything lower means the data cannot come from a
// unit-speed curve. Both radial ODEs conserve (4 alpha - alpha'^2) e^{-+alpha},
// so the numerator is evaluated through that first integral: the direct
// subtraction cancels catastrophically once alpha'^2 approaches 4 alpha
// (expanders reach there exponentially fast).
double speed_margin(SolitonKind kind, double alpha0, double dalpha0, double a, double t);

AlphaSolution solve_alpha(SolitonKind kind, double alpha0, double dalpha0, double t_span,
                          const IntegrationSettings& settings);

ThetaFn theta_joint(const AlphaSolution& alpha, double theta0, int orientation,
                    const IntegrationSettings& settings);

PolarCurve reconstruct_polar(const AlphaSolution& alpha, double theta0, int orientation,
                             int n_samples, const IntegrationSettings& settings);

ResidualReport soliton_equation_residual(const CurveSample& curve, SolitonKind kind);

}  // namespace csf::detail
