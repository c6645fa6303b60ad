#include "csf/soliton_nd.hpp"

#include <algorithm>
#include <cmath>

namespace csf {

namespace {

Vec soliton_accel(SolitonKind kind, const Vec& pos, const Vec& vel) {
  Vec perp = pos - pos.dot(vel) * vel;
  return kind == SolitonKind::shrinker ? Vec(-perp) : perp;
}

}  // namespace

CurveSample integrate_soliton(const SolitonSpec& spec) {
  const Eigen::Index n = spec.dimension;
  if (n < 2) throw InvalidInput("integrate_soliton: dimension must be >= 2");
  if (spec.p0.size() != n || spec.v0.size() != n) {
    throw InvalidInput("integrate_soliton: p0/v0 dimension mismatch");
  }
  if (std::abs(spec.v0.norm() - 1.0) > kUnitTol) {
    throw InvalidInput("integrate_soliton: v0 must be a unit vector");
  }
  if (spec.t_span == 0.0) throw InvalidInput("integrate_soliton: t_span must be nonzero");
  if (spec.settings.n_samples < 2) throw InvalidInput("integrate_soliton: need >= 2 samples");

  const SolitonKind kind = spec.kind;
  IvpProblem problem;
  problem.dimension = 2 * n;
  problem.t0 = 0.0;
  problem.t_end = spec.t_span;
  problem.y0 = Vec(2 * n);
  problem.y0.head(n) = spec.p0;
  problem.y0.tail(n) = spec.v0;
  problem.rhs = [kind, n](double, const Vec& y, Vec& dy) {
    dy.head(n) = y.tail(n);
    dy.tail(n) = soliton_accel(kind, y.head(n), y.tail(n));
  };

  IvpResult run = integrate(problem, spec.settings.integration);

  CurveSample curve;
  const int N = spec.settings.n_samples;
  const double lo = std::min(0.0, spec.t_span);
  const double hi = std::max(0.0, spec.t_span);
  curve.params = Vec::LinSpaced(N, lo, hi);
  curve.positions.resize(n, N);
  curve.d1.resize(n, N);
  curve.d2.resize(n, N);
  for (int i = 0; i < N; ++i) {
    const Vec y = run.solution.interpolate(curve.params(i));
    curve.positions.col(i) = y.head(n);
    curve.d1.col(i) = y.tail(n);
    curve.d2.col(i) = soliton_accel(kind, y.head(n), y.tail(n));
  }
  curve.validate();
  return curve;
}

PlanarityReport verify_planarity(const CurveSample& curve, SolitonKind kind,
                                 const IntegrationSettings& settings) {
  curve.validate();
  PlanarityReport report;
  report.plane = fit_plane(curve.positions);

  // Distance of the samples to the linear span of the initial position and
  // tangent, relative to 1 + |pos|. The span degenerates to a line when the
  // initial position is zero or parallel to the tangent.
  {
    const Vec p0 = curve.positions.col(0);
    const Vec v0 = curve.d1.col(0);
    std::vector<Vec> basis;
    if (v0.norm() > 1e-14) basis.push_back(v0.normalized());
    Vec p_perp = p0;
    for (const Vec& b : basis) p_perp -= b.dot(p_perp) * b;
    if (p_perp.norm() > 1e-10) basis.push_back(p_perp.normalized());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
      Vec res = curve.positions.col(i);
      const double scale = 1.0 + res.norm();
      for (const Vec& b : basis) res -= b.dot(res) * b;
      worst = std::max(worst, res.norm() / scale);
    }
    report.spanned_by_initial = worst;
  }

  double max_d2 = 0.0;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    max_d2 = std::max(max_d2, curve.d2.col(i).norm());
  }
  if (max_d2 < 1e-10) {
    // Straight line: gamma'' vanishes identically, v = r gamma' is constant
    // for constant r and the transport system carries no information.
    report.degenerate_line = true;
    report.v_drift = 0.0;
    return report;
  }

  HermiteCurve pos_interp(curve.params, curve.positions, curve.d1);
  HermiteCurve vel_interp(curve.params, curve.d1, curve.d2);
  const double sb = (kind == SolitonKind::shrinker) ? -1.0 : 1.0;

  IvpProblem rs;
  rs.dimension = 2;
  rs.t0 = curve.params(0);
  rs.t_end = curve.params(curve.params.size() - 1);
  rs.rhs = [&](double t, const Vec& y, Vec& dy) {
    const Vec g = pos_interp.eval(t);
    const Vec gp = vel_interp.eval(t);
    const double b = g.dot(gp);
    // <g,g> - <g,g'>^2 = |g - <g,g'> g'|^2 for unit tangents; the direct
    // difference cancels badly once the curve runs nearly radially.
    const double perp_sq = (g - b * gp).squaredNorm();
    dy(0) = y(1) * perp_sq;
    dy(1) = sb * y(1) * b - y(0);
  };

  const double starts[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  for (const auto& start : starts) {
    rs.y0 = Vec(2);
    rs.y0 << start[0], start[1];
    IvpResult run = integrate(rs, settings);

    RsTrajectory traj;
    traj.r0 = start[0];
    traj.s0 = start[1];
    traj.t = curve.params;
    traj.r.resize(curve.size());
    traj.s.resize(curve.size());
    Vec v0;
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
      const Vec y = run.solution.interpolate(curve.params(i));
      traj.r(i) = y(0);
      traj.s(i) = y(1);
      Vec v = y(0) * curve.d1.col(i) + y(1) * curve.d2.col(i);
      if (i == 0) {
        v0 = v;
      } else {
        traj.v_drift = std::max(traj.v_drift, (v - v0).norm());
      }
    }
    report.v_drift = std::max(report.v_drift, traj.v_drift);
    report.rs_solutions.push_back(std::move(traj));
  }
  return report;
}

ResidualReport triple_derivative_check(const CurveSample& curve, SolitonKind kind) {
  curve.validate();
  const Eigen::Index N = curve.size();
  if (N < 5) throw InvalidInput("triple_derivative_check: need at least 5 samples");

  const double h = curve.params(1) - curve.params(0);
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    if (std::abs(curve.params(i + 1) - curve.params(i) - h) > 1e-9 * std::abs(h)) {
      throw InvalidInput("triple_derivative_check: parameter grid must be uniform");
    }
  }

  ResidualReport report;
  report.equation = "triple_derivative";
  report.per_sample = Vec::Zero(N);
  const double sb = (kind == SolitonKind::shrinker) ? 1.0 : -1.0;
  double sum_sq = 0.0;
  Eigen::Index counted = 0;
  for (Eigen::Index i = 2; i + 2 < N; ++i) {
    Vec fd = (-curve.d2.col(i + 2) + 8.0 * curve.d2.col(i + 1) - 8.0 * curve.d2.col(i - 1) +
              curve.d2.col(i - 2)) /
             (12.0 * h);
    const Vec& gp = curve.d1.col(i);
    const Vec& gpp = curve.d2.col(i);
    Vec identity = -gpp.squaredNorm() * gp + sb * curve.positions.col(i).dot(gp) * gpp;
    const double r = (fd - identity).norm();
    report.per_sample(i) = r;
    report.max_residual = std::max(report.max_residual, r);
    sum_sq += r * r;
    ++counted;
  }
  report.rms_residual = counted > 0 ? std::sqrt(sum_sq / static_cast<double>(counted)) : 0.0;
  return report;
}

SphericalResiduals spherical_residuals(const CurveSample& curve) {
  curve.validate();
  if (curve.dimension() != 3) {
    throw InvalidInput("spherical_residuals: curve must live in R^3");
  }

  SphericalResiduals out;
  Eigen::Index evaluated = 0;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    const Vec& p = curve.positions.col(i);
    const Vec& dp = curve.d1.col(i);
    const Vec& ddp = curve.d2.col(i);

    const double u = p.norm();
    if (u < 1e-8) {
      ++out.skipped;
      continue;
    }
    const double rho = std::hypot(p(0), p(1));
    const double sin_phi = rho / u;
    if (sin_phi < 1e-8) {
      ++out.skipped;
      continue;
    }
    const double cos_phi = p(2) / u;

    // Chain rule from ambient coordinates: u = |p|, phi from z = u cos(phi),
    // theta from the xy projection.
    const double up = p.dot(dp) / u;
    const double upp = (dp.dot(dp) + p.dot(ddp) - up * up) / u;
    const double phip = (up * cos_phi - dp(2)) / (u * sin_phi);
    const double phipp =
        (upp * cos_phi - 2.0 * up * sin_phi * phip - u * cos_phi * phip * phip - ddp(2)) /
        (u * sin_phi);
    const double rho2 = rho * rho;
    const double thetap = (p(0) * dp(1) - p(1) * dp(0)) / rho2;
    const double thetapp = (p(0) * ddp(1) - p(1) * ddp(0)) / rho2 -
                           2.0 * thetap * (p(0) * dp(0) + p(1) * dp(1)) / rho2;

    const double cot_phi = cos_phi / sin_phi;
    const double radial =
        upp - sin_phi * sin_phi * u * thetap * thetap - u * phip * phip + u - u * up * up;
    const double theta_eq = 2.0 * up * thetap + u * thetapp + 2.0 * u * thetap * phip * cot_phi -
                            u * u * up * thetap;
    const double phi_eq = 2.0 * up * phip - u * thetap * thetap * sin_phi * cos_phi + u * phipp -
                          u * u * up * phip;
    const double speed = up * up + u * u * thetap * thetap * sin_phi * sin_phi +
                         u * u * phip * phip - 1.0;

    out.res_radial = std::max(out.res_radial, std::abs(radial));
    out.res_theta = std::max(out.res_theta, std::abs(theta_eq));
    out.res_phi = std::max(out.res_phi, std::abs(phi_eq));
    out.res_speed = std::max(out.res_speed, std::abs(speed));
    ++evaluated;
  }
  if (evaluated == 0) {
    throw DomainError("spherical_residuals: every sample sits on a coordinate singularity",
                      curve.params(0));
  }
  return out;
}

}  // namespace csf
