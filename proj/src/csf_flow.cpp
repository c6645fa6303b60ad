#include "csf/csf_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csf {

namespace {

constexpr double kMinEdge = 1e-12;
constexpr double kStabilityFactor = 0.25;

double min_edge_length(const PolyCurve& c) {
  const Eigen::Index N = c.size();
  double min_sq = std::numeric_limits<double>::infinity();
  const Eigen::Index edges = c.closed ? N : N - 1;
  for (Eigen::Index i = 0; i < edges; ++i) {
    const Eigen::Index j = (i + 1) % N;
    min_sq = std::min(min_sq, (c.vertices.col(j) - c.vertices.col(i)).squaredNorm());
  }
  return std::sqrt(min_sq);
}

double poly_diameter(const Mat& v) {
  double max_sq = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < v.cols(); ++j) {
      max_sq = std::max(max_sq, (v.col(i) - v.col(j)).squaredNorm());
    }
  }
  return std::sqrt(max_sq);
}

// Velocity of every vertex from centered differences in the current
// (index) parametrization. The combination is invariant under tangential
// reparametrization, so for collinear neighbors it vanishes identically.
Mat flow_velocity(const PolyCurve& c) {
  const Eigen::Index N = c.size();
  Mat vel = Mat::Zero(c.dimension(), N);
  const Eigen::Index first = c.closed ? 0 : 1;
  const Eigen::Index last = c.closed ? N : N - 1;  // open: endpoints pinned
  for (Eigen::Index i = first; i < last; ++i) {
    const Eigen::Index prev = (i + N - 1) % N;
    const Eigen::Index next = (i + 1) % N;
    Vec g1 = 0.5 * (c.vertices.col(next) - c.vertices.col(prev));
    Vec g2 = c.vertices.col(next) - 2.0 * c.vertices.col(i) + c.vertices.col(prev);
    const double q = g1.squaredNorm();
    if (!(q > 0.0)) throw NumericalError("evolve: degenerate vertex neighborhood");
    vel.col(i) = g2 / q - (g2.dot(g1) / (q * q)) * g1;
  }
  return vel;
}

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_to_polyline(const Vec& p, const PolyCurve& c) {
  const Eigen::Index N = c.size();
  const Eigen::Index edges = c.closed ? N : N - 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < edges; ++i) {
    best = std::min(best, segment_distance(p, c.vertices.col(i), c.vertices.col((i + 1) % N)));
  }
  return best;
}

}  // namespace

void PolyCurve::validate() const {
  const Eigen::Index N = size();
  if (dimension() < 2) throw InvalidInput("PolyCurve: dimension must be >= 2");
  if (closed && N < 3) throw InvalidInput("PolyCurve: closed curve needs >= 3 vertices");
  if (!closed && N < 2) throw InvalidInput("PolyCurve: open curve needs >= 2 vertices");
  if (!vertices.allFinite()) throw InvalidInput("PolyCurve: non-finite vertex");
  if (min_edge_length(*this) <= kMinEdge) {
    throw InvalidInput("PolyCurve: consecutive vertices closer than 1e-12");
  }
}

double polygon_length(const PolyCurve& curve) {
  const Eigen::Index N = curve.size();
  const Eigen::Index edges = curve.closed ? N : N - 1;
  double len = 0.0;
  for (Eigen::Index i = 0; i < edges; ++i) {
    len += (curve.vertices.col((i + 1) % N) - curve.vertices.col(i)).norm();
  }
  return len;
}

double polygon_area(const PolyCurve& curve) {
  if (!curve.closed) throw InvalidInput("polygon_area: curve must be closed");
  if (curve.dimension() != 2) throw InvalidInput("polygon_area: curve must be planar");
  const Eigen::Index N = curve.size();
  double twice = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Index j = (i + 1) % N;
    twice += curve.vertices(0, i) * curve.vertices(1, j) -
             curve.vertices(0, j) * curve.vertices(1, i);
  }
  return 0.5 * twice;
}

PolyCurve resample_uniform(const PolyCurve& curve, Eigen::Index n) {
  if (!curve.closed) throw InvalidInput("resample_uniform: curve must be closed");
  if (n < 3) throw InvalidInput("resample_uniform: need at least 3 vertices");
  const Eigen::Index N = curve.size();

  std::vector<double> cum(N + 1, 0.0);
  for (Eigen::Index i = 0; i < N; ++i) {
    cum[i + 1] = cum[i] + (curve.vertices.col((i + 1) % N) - curve.vertices.col(i)).norm();
  }
  const double total = cum[N];

  PolyCurve out;
  out.closed = true;
  out.vertices.resize(curve.dimension(), n);
  Eigen::Index seg = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n);
    while (seg + 1 < N && cum[seg + 1] < target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double frac = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    out.vertices.col(j) = (1.0 - frac) * curve.vertices.col(seg) +
                          frac * curve.vertices.col((seg + 1) % N);
  }
  return out;
}

double hausdorff_distance(const PolyCurve& a, const PolyCurve& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, point_to_polyline(a.vertices.col(i), b));
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    worst = std::max(worst, point_to_polyline(b.vertices.col(i), a));
  }
  return worst;
}

FlowRun evolve(const PolyCurve& curve, double t_end, double dt_max, bool resample,
               const FlowSettings& settings) {
  curve.validate();
  if (!(t_end > 0.0)) throw InvalidInput("evolve: t_end must be positive");
  if (!(dt_max > 0.0)) throw InvalidInput("evolve: dt_max must be positive");

  const bool planar_closed = curve.closed && curve.dimension() == 2;
  const bool do_resample = resample && curve.closed;

  FlowRun run;
  PolyCurve state = curve;
  double t = 0.0;
  const double area0 = planar_closed ? std::abs(polygon_area(state)) : 0.0;

  long stride = 1;
  long step = 0;
  auto record = [&]() {
    run.times.push_back(t);
    run.snapshots.push_back(state);
    run.lengths.push_back(polygon_length(state));
    if (planar_closed) run.areas.push_back(polygon_area(state));
    if (static_cast<int>(run.snapshots.size()) >= settings.max_snapshots) {
      // Thin to every other recorded state and double the stride.
      std::size_t w = 0;
      for (std::size_t rdx = 0; rdx < run.snapshots.size(); rdx += 2, ++w) {
        run.times[w] = run.times[rdx];
        run.snapshots[w] = run.snapshots[rdx];
        run.lengths[w] = run.lengths[rdx];
        if (planar_closed) run.areas[w] = run.areas[rdx];
      }
      run.times.resize(w);
      run.snapshots.resize(w);
      run.lengths.resize(w);
      if (planar_closed) run.areas.resize(w);
      stride *= 2;
    }
  };
  record();

  run.status = FlowStatus::completed;
  while (t < t_end) {
    const double remaining = t_end - t;
    if (remaining <= 1e-14 * std::max(1.0, t_end)) break;  // finished up to rounding
    if (step >= settings.max_steps) {
      run.status = FlowStatus::failed;
      break;
    }
    const double h_min = min_edge_length(state);
    double dt = std::min(dt_max, kStabilityFactor * h_min * h_min);
    dt = std::min(dt, remaining);
    if (!(dt > 1e-15 * std::max(1.0, t_end))) {
      run.status = FlowStatus::failed;
      break;
    }

    Mat vel;
    try {
      vel = flow_velocity(state);
    } catch (const NumericalError&) {
      run.status = FlowStatus::failed;
      break;
    }
    state.vertices += dt * vel;
    t += dt;
    ++step;

    if (do_resample) {
      state = resample_uniform(state, state.size());
    }
    if (min_edge_length(state) <= kMinEdge) {
      run.status = FlowStatus::failed;
      break;
    }
    if (planar_closed &&
        std::abs(polygon_area(state)) < settings.extinction_fraction * area0) {
      run.status = FlowStatus::extinct;
      break;
    }
    if (step % stride == 0) record();
  }

  if (run.times.back() != t) record();
  return run;
}

std::pair<double, double> length_variation_check(const PolyCurve& curve,
                                                 const Mat& variation_field) {
  curve.validate();
  if (!curve.closed) throw InvalidInput("length_variation_check: curve must be closed");
  if (variation_field.rows() != curve.dimension() || variation_field.cols() != curve.size()) {
    throw InvalidInput("length_variation_check: field shape mismatch");
  }
  const Eigen::Index N = curve.size();
  const double eps = 1e-6 * poly_diameter(curve.vertices);

  PolyCurve plus = curve, minus = curve;
  plus.vertices += eps * variation_field;
  minus.vertices -= eps * variation_field;
  const double numeric = (polygon_length(plus) - polygon_length(minus)) / (2.0 * eps);

  // -sum <V_i, gamma_ss,i> ds_i with the discrete curvature vector
  // (u_i - u_{i-1}) / ds_i built from unit edges and mean edge weights.
  double formula = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Index prev = (i + N - 1) % N;
    const Eigen::Index next = (i + 1) % N;
    Vec e_prev = curve.vertices.col(i) - curve.vertices.col(prev);
    Vec e_next = curve.vertices.col(next) - curve.vertices.col(i);
    formula -= variation_field.col(i).dot(e_next.normalized() - e_prev.normalized());
  }
  return {numeric, formula};
}

std::pair<double, double> area_variation_check(const PolyCurve& curve,
                                               const Mat& variation_field) {
  curve.validate();
  if (!curve.closed || curve.dimension() != 2) {
    throw InvalidInput("area_variation_check: need a closed planar curve");
  }
  if (variation_field.rows() != 2 || variation_field.cols() != curve.size()) {
    throw InvalidInput("area_variation_check: field shape mismatch");
  }
  const Eigen::Index N = curve.size();
  const double eps = 1e-6 * poly_diameter(curve.vertices);

  PolyCurve plus = curve, minus = curve;
  plus.vertices += eps * variation_field;
  minus.vertices -= eps * variation_field;
  const double numeric = (polygon_area(plus) - polygon_area(minus)) / (2.0 * eps);

  // sum <V_i, n_i> ds_i with n_i ds_i = ((y_next - y_prev)/2, -(x_next - x_prev)/2),
  // the normal that points outward for positively oriented curves.
  double formula = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Index prev = (i + N - 1) % N;
    const Eigen::Index next = (i + 1) % N;
    const double dx = curve.vertices(0, next) - curve.vertices(0, prev);
    const double dy = curve.vertices(1, next) - curve.vertices(1, prev);
    formula += 0.5 * (variation_field(0, i) * dy - variation_field(1, i) * dx);
  }
  return {numeric, formula};
}

std::vector<std::pair<double, double>> rescaled_flow_area(
    const FlowRun& run, const std::function<double(double)>& c) {
  if (run.areas.size() != run.times.size()) {
    throw InvalidInput("rescaled_flow_area: run carries no area data (planar closed only)");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(run.times.size());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double factor = c(run.times[i]);
    if (!std::isfinite(factor)) {
      throw DomainError("rescaled_flow_area: scale factor undefined", run.times[i]);
    }
    out.emplace_back(run.times[i], factor * factor * run.areas[i]);
  }
  return out;
}

}  // namespace csf
