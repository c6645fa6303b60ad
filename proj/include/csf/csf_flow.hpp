#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "csf/types.hpp"

namespace csf {

/// Polygonal curve; columns of vertices are the points, consecutive
/// vertices distinct. Closed curves connect the last column back to the
/// first.
struct PolyCurve {
  Mat vertices;  // n x N
  bool closed = true;

  Eigen::Index dimension() const { return vertices.rows(); }
  Eigen::Index size() const { return vertices.cols(); }
  void validate() const;
};

enum class FlowStatus { completed, extinct, failed };

/// Evolution record: recorded states with their times, perimeter lengths
/// and (planar closed curves only) signed areas, all aligned by index.
struct FlowRun {
  std::vector<double> times;
  std::vector<PolyCurve> snapshots;
  std::vector<double> lengths;
  std::vector<double> areas;  // empty unless planar and closed
  FlowStatus status = FlowStatus::completed;
};

struct FlowSettings {
  double extinction_fraction = 1e-4;  // stop when |area| falls below this x initial
  long max_steps = 5'000'000;
  int max_snapshots = 1200;
};

double polygon_length(const PolyCurve& curve);

/// Signed area of a closed planar polygon (Green's theorem).
double polygon_area(const PolyCurve& curve);

/// Resamples a closed polygon to n uniformly spaced vertices along its
/// arc length, keeping vertex 0 anchored.
PolyCurve resample_uniform(const PolyCurve& curve, Eigen::Index n);

/// Largest vertex-to-polyline distance between the two curves (symmetric).
double hausdorff_distance(const PolyCurve& a, const PolyCurve& b);

/// Explicit curve-shortening evolution. Per-vertex velocity is the centered
/// finite-difference form of gamma''/<gamma',gamma'> -
/// (<gamma'',gamma'>/<gamma',gamma'>^2) gamma' in the current
/// parametrization; the time step is capped by 0.25 x (min edge length)^2.
/// Closed curves may be resampled to uniform arc length each step; open
/// curves keep their endpoints fixed.
FlowRun evolve(const PolyCurve& curve, double t_end, double dt_max, bool resample,
               const FlowSettings& settings = {});

/// Central finite difference of the polygon length under +-eps * field
/// against the discrete quadrature of -<V, gamma_ss> ds.
/// Returns (numeric, formula).
std::pair<double, double> length_variation_check(const PolyCurve& curve,
                                                 const Mat& variation_field);

/// Central finite difference of the signed enclosed area against the
/// discrete quadrature of <V, N> ds with N the outward-for-positive-
/// orientation normal (y_s, -x_s). Returns (numeric, formula).
std::pair<double, double> area_variation_check(const PolyCurve& curve,
                                               const Mat& variation_field);

/// Areas of the snapshots rescaled by c(t): pairs (time, c(t)^2 * area).
/// Throws DomainError where c(t) is not finite.
std::vector<std::pair<double, double>> rescaled_flow_area(
    const FlowRun& run, const std::function<double(double)>& c);

}  // namespace csf
