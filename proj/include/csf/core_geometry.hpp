#pragma once

#include <cmath>

#include "csf/types.hpp"

namespace csf {

inline constexpr double kUnitTol = 1e-12;

/// Discretized curve with derivatives. Column i of positions/d1/d2 belongs
/// to params(i); all samples share one ambient dimension.
struct CurveSample {
  Vec params;     // strictly increasing parameter values
  Mat positions;  // n x N
  Mat d1;         // first derivative per sample
  Mat d2;         // second derivative per sample

  Eigen::Index dimension() const { return positions.rows(); }
  Eigen::Index size() const { return positions.cols(); }

  /// Throws InvalidInput when an invariant is broken.
  void validate() const;
};

/// Least-squares plane through a point cloud: basepoint plus an orthonormal
/// in-plane basis, with distance statistics of the samples to the plane.
struct PlaneFit {
  Vec basepoint;
  Vec basis1;
  Vec basis2;
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

/// Component of p orthogonal to a unit tangent.
template <typename DerivedP, typename DerivedT>
Vec perp_component(const Eigen::MatrixBase<DerivedP>& p,
                   const Eigen::MatrixBase<DerivedT>& tangent, double unit_tol = kUnitTol) {
  if (std::abs(tangent.norm() - 1.0) > unit_tol) {
    throw InvalidInput("perp_component: tangent must be a unit vector");
  }
  return p - p.dot(tangent) * tangent;
}

/// Best-fit 2-plane of a point cloud (columns of points): centroid plus the
/// two principal directions of the second-moment matrix. Collinear clouds
/// yield some plane containing the line; residuals stay valid either way.
PlaneFit fit_plane(const Mat& points);
PlaneFit fit_plane(const CurveSample& curve);

/// max over samples of | |d1_i| - 1 |.
double arc_length_defect(const CurveSample& curve);

/// Largest pairwise distance between sample positions.
double curve_diameter(const Mat& positions);

/// Straight line through the origin, gamma(t) = t * direction/|direction|.
CurveSample line_curve(const Vec& direction, const Vec& params);

/// Piecewise cubic Hermite interpolant of vector-valued samples with known
/// derivatives; C^1, exact at the nodes.
class HermiteCurve {
 public:
  HermiteCurve() = default;
  HermiteCurve(Vec params, Mat values, Mat derivs);

  Vec eval(double t) const;
  double t_begin() const { return params_(0); }
  double t_end() const { return params_(params_.size() - 1); }

 private:
  Vec params_;
  Mat values_;
  Mat derivs_;
};

}  // namespace csf
