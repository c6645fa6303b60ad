#include "csf/expander_planar.hpp"

#include "polar_detail.hpp"

namespace csf {

AlphaSolution solve_alpha_expander(double alpha0, double dalpha0, double t_span,
                                   const IntegrationSettings& settings) {
  return detail::solve_alpha(SolitonKind::expander, alpha0, dalpha0, t_span, settings);
}

PolarCurve reconstruct_expander(const AlphaSolution& alpha, double theta0, int orientation,
                                int n_samples, const IntegrationSettings& settings) {
  if (alpha.kind != SolitonKind::expander) {
    throw InvalidInput("reconstruct_expander: alpha solution has shrinker kind");
  }
  return detail::reconstruct_polar(alpha, theta0, orientation, n_samples, settings);
}

ResidualReport expander_residual(const CurveSample& curve) {
  return detail::soliton_equation_residual(curve, SolitonKind::expander);
}

}  // namespace csf
