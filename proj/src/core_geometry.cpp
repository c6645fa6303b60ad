#include "csf/core_geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace csf {

void CurveSample::validate() const {
  const Eigen::Index n = positions.rows();
  const Eigen::Index N = positions.cols();
  if (N < 2) throw InvalidInput("CurveSample: need at least 2 samples");
  if (n < 2) throw InvalidInput("CurveSample: ambient dimension must be >= 2");
  if (params.size() != N || d1.cols() != N || d2.cols() != N) {
    throw InvalidInput("CurveSample: params/positions/d1/d2 length mismatch");
  }
  if (d1.rows() != n || d2.rows() != n) {
    throw InvalidInput("CurveSample: mixed ambient dimensions");
  }
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    if (!(params(i) < params(i + 1))) {
      throw InvalidInput("CurveSample: params must be strictly increasing");
    }
  }
  if (!params.allFinite() || !positions.allFinite() || !d1.allFinite() || !d2.allFinite()) {
    throw InvalidInput("CurveSample: non-finite entry");
  }
}

PlaneFit fit_plane(const Mat& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index N = points.cols();
  if (N < 3) throw InvalidInput("fit_plane: need at least 3 samples");
  if (n < 2) throw InvalidInput("fit_plane: ambient dimension must be >= 2");

  PlaneFit fit;
  fit.basepoint = points.rowwise().mean();
  Mat centered = points.colwise() - fit.basepoint;

  // Second-moment matrix; its top two eigenvectors span the plane.
  Mat second_moment = centered * centered.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(second_moment);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("fit_plane: eigen decomposition failed");
  }
  // Eigenvalues come back ascending.
  fit.basis1 = eig.eigenvectors().col(n - 1);
  fit.basis2 = eig.eigenvectors().col(n - 2);

  double max_sq = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    Vec c = centered.col(i);
    c -= fit.basis1.dot(c) * fit.basis1;
    c -= fit.basis2.dot(c) * fit.basis2;
    const double sq = c.squaredNorm();
    max_sq = std::max(max_sq, sq);
    sum_sq += sq;
  }
  fit.max_residual = std::sqrt(max_sq);
  fit.rms_residual = std::sqrt(sum_sq / static_cast<double>(N));
  return fit;
}

PlaneFit fit_plane(const CurveSample& curve) {
  curve.validate();
  return fit_plane(curve.positions);
}

double arc_length_defect(const CurveSample& curve) {
  if (curve.d1.cols() == 0) throw InvalidInput("arc_length_defect: empty curve");
  double defect = 0.0;
  for (Eigen::Index i = 0; i < curve.d1.cols(); ++i) {
    defect = std::max(defect, std::abs(curve.d1.col(i).norm() - 1.0));
  }
  return defect;
}

double curve_diameter(const Mat& positions) {
  double max_sq = 0.0;
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < positions.cols(); ++j) {
      max_sq = std::max(max_sq, (positions.col(i) - positions.col(j)).squaredNorm());
    }
  }
  return std::sqrt(max_sq);
}

CurveSample line_curve(const Vec& direction, const Vec& params) {
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw InvalidInput("line_curve: zero direction");
  Vec unit = direction / norm;

  CurveSample curve;
  curve.params = params;
  curve.positions.resize(unit.size(), params.size());
  curve.d1.resize(unit.size(), params.size());
  curve.d2 = Mat::Zero(unit.size(), params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    curve.positions.col(i) = params(i) * unit;
    curve.d1.col(i) = unit;
  }
  curve.validate();
  return curve;
}

HermiteCurve::HermiteCurve(Vec params, Mat values, Mat derivs)
    : params_(std::move(params)), values_(std::move(values)), derivs_(std::move(derivs)) {
  if (params_.size() < 2 || values_.cols() != params_.size() || derivs_.cols() != params_.size()) {
    throw InvalidInput("HermiteCurve: inconsistent sample arrays");
  }
}

Vec HermiteCurve::eval(double t) const {
  const Eigen::Index N = params_.size();
  const double slack = 1e-12 * (params_(N - 1) - params_(0));
  if (t < params_(0) - slack || t > params_(N - 1) + slack) {
    throw InvalidInput("HermiteCurve: time outside the sampled span");
  }
  // Locate the interval by binary search.
  Eigen::Index lo = 0, hi = N - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (params_(mid) <= t) lo = mid; else hi = mid;
  }
  const double h = params_(lo + 1) - params_(lo);
  const double s = std::clamp((t - params_(lo)) / h, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_.col(lo) + (h10 * h) * derivs_.col(lo) +
         h01 * values_.col(lo + 1) + (h11 * h) * derivs_.col(lo + 1);
}

}  // namespace csf
