#include "csf/shrinker_planar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polar_detail.hpp"

namespace csf {

namespace detail {

double speed_margin(SolitonKind kind, double alpha0, double dalpha0, double a, double t) {
  if (!(a > 0.0)) {
    throw PositivityError("polar reduction: alpha must stay positive", t);
  }
  const double conserved = 4.0 * alpha0 - dalpha0 * dalpha0;
  const double growth =
      kind == SolitonKind::shrinker ? std::exp(a - alpha0) : std::exp(alpha0 - a);
  double margin = conserved * growth / (4.0 * a);
  if (margin < 0.0) {
    if (margin < -1e-10) {
      throw DomainError("polar reduction: |u'| exceeded 1, theta' is undefined", t);
    }
    margin = 0.0;
  }
  return margin;
}

AlphaSolution solve_alpha(SolitonKind kind, double alpha0, double dalpha0, double t_span,
                          const IntegrationSettings& settings) {
  if (!(alpha0 > 0.0)) throw InvalidInput("solve_alpha: alpha0 must be positive");
  if (t_span == 0.0) throw InvalidInput("solve_alpha: t_span must be nonzero");

  IvpProblem problem;
  problem.dimension = 2;
  problem.t0 = 0.0;
  problem.t_end = t_span;
  problem.y0 = Vec(2);
  problem.y0 << alpha0, dalpha0;
  problem.rhs = [kind](double, const Vec& y, Vec& dy) {
    dy(0) = y(1);
    dy(1) = alpha_accel(kind, y(0), y(1));
  };

  std::vector<EventSpec> events(3);
  // alpha hitting zero ends the run; the polar reduction needs alpha > 0.
  events[0].event_fn = [](double, const Vec& y) { return y(0); };
  events[0].direction = EventDirection::falling;
  events[0].terminal = true;
  events[1].event_fn = [](double, const Vec& y) { return y(1); };
  events[1].direction = EventDirection::rising;
  events[2].event_fn = [](double, const Vec& y) { return y(1); };
  events[2].direction = EventDirection::falling;

  IvpResult run = integrate(problem, settings, events);

  for (const EventHit& hit : run.events) {
    if (hit.event_index == 0) {
      throw PositivityError("solve_alpha: alpha reached zero", hit.time);
    }
  }

  AlphaSolution out;
  out.kind = kind;
  out.alpha0 = alpha0;
  out.dalpha0 = dalpha0;
  out.solution = std::move(run.solution);

  // Period detection on the critical points of alpha. Starting at a
  // critical point, the first crossing of the same direction is the full
  // period; starting mid-slope it is the gap between consecutive minima.
  const double accel0 = alpha_accel(kind, alpha0, dalpha0);
  auto state_matches = [&](const EventHit& h) {
    return std::abs(h.state(0) - alpha0) <= kPeriodStateTol &&
           std::abs(h.state(1) - dalpha0) <= kPeriodStateTol;
  };
  if (dalpha0 == 0.0) {
    if (accel0 != 0.0) {
      const int want = accel0 > 0.0 ? 1 : 2;
      for (const EventHit& hit : run.events) {
        if (hit.event_index == want && state_matches(hit)) {
          out.period = std::abs(hit.time);
          break;
        }
      }
    }
    // accel0 == 0: the constant (circle) equilibrium, period stays absent.
  } else {
    std::vector<const EventHit*> minima;
    for (const EventHit& hit : run.events) {
      if (hit.event_index == 1) minima.push_back(&hit);
    }
    if (minima.size() >= 2 &&
        std::abs(minima[0]->state(0) - minima[1]->state(0)) <= kPeriodStateTol) {
      out.period = std::abs(minima[1]->time - minima[0]->time);
    }
  }
  return out;
}

ThetaFn theta_joint(const AlphaSolution& alpha, double theta0, int orientation,
                    const IntegrationSettings& settings) {
  if (orientation != 1 && orientation != -1) {
    throw InvalidInput("theta_from_alpha: orientation must be +1 or -1");
  }
  const SolitonKind kind = alpha.kind;
  const double a0 = alpha.alpha0, da0 = alpha.dalpha0;

  IvpProblem problem;
  problem.dimension = 3;
  problem.t0 = alpha.solution.t_begin();
  problem.t_end = alpha.solution.t_end();
  problem.y0 = Vec(3);
  problem.y0 << a0, da0, theta0;
  problem.rhs = [kind, orientation, a0, da0](double t, const Vec& y, Vec& dy) {
    const double a = y(0), da = y(1);
    dy(0) = da;
    dy(1) = alpha_accel(kind, a, da);
    dy(2) = orientation * std::sqrt(speed_margin(kind, a0, da0, a, t)) / std::sqrt(a);
  };

  IvpResult run = integrate(problem, settings);
  ThetaFn fn;
  fn.joint = std::make_shared<IvpSolution>(std::move(run.solution));
  return fn;
}

PolarCurve reconstruct_polar(const AlphaSolution& alpha, double theta0, int orientation,
                             int n_samples, const IntegrationSettings& settings) {
  if (n_samples < 16) throw InvalidInput("reconstruct: need at least 16 samples");

  PolarCurve curve;
  curve.alpha = alpha;
  curve.theta0 = theta0;
  curve.orientation = orientation;
  curve.theta = theta_joint(alpha, theta0, orientation, settings);

  const IvpSolution& joint = *curve.theta.joint;
  const double ta = joint.t_begin();
  const double tb = joint.t_end();
  const SolitonKind kind = alpha.kind;

  CurveSample& s = curve.samples;
  s.params = Vec::LinSpaced(n_samples, std::min(ta, tb), std::max(ta, tb));
  s.positions.resize(2, n_samples);
  s.d1.resize(2, n_samples);
  s.d2.resize(2, n_samples);

  for (int i = 0; i < n_samples; ++i) {
    const double t = s.params(i);
    const Vec y = joint.interpolate(t);
    const double a = y(0), da = y(1), th = y(2);
    const double u = std::sqrt(a);
    const double up = da / (2.0 * u);
    const double thp =
        orientation * std::sqrt(speed_margin(kind, alpha.alpha0, alpha.dalpha0, a, t)) / u;
    const double app = alpha_accel(kind, a, da);
    const double upp = (app - 2.0 * up * up) / (2.0 * u);
    const double thpp = (kind == SolitonKind::shrinker)
                            ? up * thp * (u * u - 2.0) / u
                            : -up * thp * (u * u + 2.0) / u;
    const double c = std::cos(th), sn = std::sin(th);
    const Eigen::Vector2d radial(c, sn), transverse(-sn, c);
    s.positions.col(i) = u * radial;
    s.d1.col(i) = up * radial + (u * thp) * transverse;
    s.d2.col(i) = (upp - u * thp * thp) * radial + (2.0 * up * thp + u * thpp) * transverse;
  }
  s.validate();
  return curve;
}

ResidualReport soliton_equation_residual(const CurveSample& curve, SolitonKind kind) {
  curve.validate();
  if (arc_length_defect(curve) > 1e-4) {
    throw InvalidInput("residual: curve is not parametrized by arc length");
  }
  ResidualReport report;
  report.equation = kind == SolitonKind::shrinker ? "shrinker" : "expander";
  report.per_sample.resize(curve.size());
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    const Vec& p = curve.positions.col(i);
    const Vec& v = curve.d1.col(i);
    Vec rhs = p.dot(v) * v - p;
    if (kind == SolitonKind::expander) rhs = -rhs;
    const double r = (curve.d2.col(i) - rhs).norm();
    report.per_sample(i) = r;
    report.max_residual = std::max(report.max_residual, r);
    sum_sq += r * r;
  }
  report.rms_residual = std::sqrt(sum_sq / static_cast<double>(curve.size()));
  return report;
}

}  // namespace detail

AlphaSolution solve_alpha_shrinker(double alpha0, double dalpha0, double t_span,
                                   const IntegrationSettings& settings) {
  return detail::solve_alpha(SolitonKind::shrinker, alpha0, dalpha0, t_span, settings);
}

ThetaFn theta_from_alpha(const AlphaSolution& alpha, double theta0, int orientation,
                         const IntegrationSettings& settings) {
  return detail::theta_joint(alpha, theta0, orientation, settings);
}

PolarCurve reconstruct_shrinker(const AlphaSolution& alpha, double theta0, int orientation,
                                int n_samples, const IntegrationSettings& settings) {
  if (alpha.kind != SolitonKind::shrinker) {
    throw InvalidInput("reconstruct_shrinker: alpha solution has expander kind");
  }
  return detail::reconstruct_polar(alpha, theta0, orientation, n_samples, settings);
}

double polar_constraint_residual(const PolarCurve& curve) {
  const IvpSolution& joint = *curve.theta.joint;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < curve.samples.params.size(); ++i) {
    const double t = curve.samples.params(i);
    const Vec y = joint.interpolate(t);
    const double a = y(0), da = y(1);
    // u'^2 comes from the local state, theta'^2 from the conserved form;
    // their mismatch measures how well the trajectory keeps unit speed.
    const double up2 = da * da / (4.0 * a);
    const double thp2 =
        detail::speed_margin(curve.alpha.kind, curve.alpha.alpha0, curve.alpha.dalpha0, a, t) /
        a;
    worst = std::max(worst, std::abs(thp2 * a + up2 - 1.0));
  }
  return worst;
}

ResidualReport shrinker_residual(const CurveSample& curve) {
  return detail::soliton_equation_residual(curve, SolitonKind::shrinker);
}

ClosureReport closure_report(double alpha0, int q_max, const IntegrationSettings& settings) {
  if (!(alpha0 > 0.0)) throw InvalidInput("closure_report: alpha0 must be positive");
  if (q_max < 1) throw InvalidInput("closure_report: q_max must be >= 1");

  ClosureReport report;
  report.alpha0 = alpha0;
  if (alpha0 == 1.0) {
    // Circle equilibrium: trivially closed, no radial period to measure.
    report.closed = true;
    return report;
  }

  AlphaSolution alpha = solve_alpha_shrinker(alpha0, 0.0, 40.0, settings);
  if (!alpha.period) {
    alpha = solve_alpha_shrinker(alpha0, 0.0, 200.0, settings);
  }
  if (!alpha.period) {
    report.failed = true;
    report.failure = "no radial period detected";
    return report;
  }
  const double T = *alpha.period;
  report.period = T;

  ThetaFn theta = theta_from_alpha(alpha, 0.0, +1, settings);
  const double dtheta = theta(T) - theta(0.0);
  report.delta_theta = dtheta;
  report.rotation_ratio = dtheta / (2.0 * std::numbers::pi);

  double best_gap = std::numeric_limits<double>::infinity();
  int best_p = 0, best_q = 0;
  for (int q = 1; q <= q_max; ++q) {
    const double total = q * dtheta;
    const int p = std::max(1, static_cast<int>(std::lround(total / (2.0 * std::numbers::pi))));
    const double gap = std::abs(total - 2.0 * std::numbers::pi * p);
    if (gap < best_gap) {
      best_gap = gap;
      best_p = p;
      best_q = q;
    }
  }
  report.closure_gap = best_gap;
  report.best_p = best_p;
  report.best_q = best_q;

  if (best_gap <= kClosureGapTol) {
    // Second witness: the reconstructed curve must return to its start
    // after best_q radial periods.
    AlphaSolution long_alpha =
        solve_alpha_shrinker(alpha0, 0.0, best_q * T, settings);
    PolarCurve curve =
        reconstruct_shrinker(long_alpha, 0.0, +1, std::max(257, 256 * best_q + 1), settings);
    const double diameter = curve_diameter(curve.samples.positions);
    const double endpoint_gap =
        (curve.samples.positions.col(curve.samples.size() - 1) - curve.samples.positions.col(0))
            .norm();
    report.closed = endpoint_gap <= kClosureEndpointTol * diameter;
  }
  return report;
}

ClosureScan closure_scan(double from, double to, int n_grid, int q_max,
                         const IntegrationSettings& settings) {
  if (!(from > 0.0 && to > from && to <= 1.0 - 1e-4)) {
    throw InvalidInput("closure_scan: range must lie inside (0, 1 - 1e-4]");
  }
  if (n_grid < 2) throw InvalidInput("closure_scan: need at least 2 grid points");

  ClosureScan scan;
  scan.reports.reserve(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double a0 = from + (to - from) * static_cast<double>(i) / (n_grid - 1);
    try {
      scan.reports.push_back(closure_report(a0, q_max, settings));
    } catch (const NumericalError& e) {
      ClosureReport failed;
      failed.alpha0 = a0;
      failed.failed = true;
      failed.failure = e.what();
      scan.reports.push_back(std::move(failed));
    }
    if (scan.reports.back().failed) ++scan.n_failed;
  }

  // Strict monotonicity (either direction) of rotation_ratio across the grid.
  bool increasing = true, decreasing = true, all_present = true;
  for (std::size_t i = 0; i + 1 < scan.reports.size(); ++i) {
    const auto& a = scan.reports[i].rotation_ratio;
    const auto& b = scan.reports[i + 1].rotation_ratio;
    if (!a || !b) {
      all_present = false;
      break;
    }
    if (!(*a < *b)) increasing = false;
    if (!(*a > *b)) decreasing = false;
  }
  scan.rotation_ratio_monotone = all_present && (increasing || decreasing);
  return scan;
}

double refine_rotation_ratio(int p, int q, double a_lo, double a_hi,
                             const IntegrationSettings& settings, double ratio_tol) {
  if (q < 1 || p < 1) throw InvalidInput("refine_rotation_ratio: p, q must be positive");
  if (!(a_lo > 0.0 && a_hi > a_lo)) throw InvalidInput("refine_rotation_ratio: bad bracket");
  const double target = static_cast<double>(p) / static_cast<double>(q);

  auto ratio_at = [&](double a0) {
    ClosureReport r = closure_report(a0, 1, settings);
    if (!r.rotation_ratio) {
      throw NumericalError("refine_rotation_ratio: rotation ratio unavailable at alpha0 = " +
                           std::to_string(a0));
    }
    return *r.rotation_ratio;
  };

  double lo = a_lo, hi = a_hi;
  double r_lo = ratio_at(lo), r_hi = ratio_at(hi);
  if ((r_lo - target) * (r_hi - target) > 0.0) {
    throw InvalidInput("refine_rotation_ratio: target ratio is not bracketed");
  }
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    mid = 0.5 * (lo + hi);
    const double r_mid = ratio_at(mid);
    if (std::abs(r_mid - target) <= ratio_tol || hi - lo < 1e-15) return mid;
    if ((r_lo - target) * (r_mid - target) <= 0.0) {
      hi = mid;
      r_hi = r_mid;
    } else {
      lo = mid;
      r_lo = r_mid;
    }
  }
  return mid;
}

}  // namespace csf
