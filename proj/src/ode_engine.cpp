#include "csf/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csf {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Quartic continuous extension of the pair (columns multiply theta^1..theta^4).
const double kDense[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0}};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -0.2;  // -1/(order of the lower method + 1)

double rms_norm(const Vec& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

void check_problem(const IvpProblem& p, bool with_settings, const IntegrationSettings& s) {
  if (p.dimension <= 0 || p.y0.size() != p.dimension) {
    throw InvalidInput("integrate: y0 length must equal the declared dimension");
  }
  if (!p.rhs) throw InvalidInput("integrate: missing right-hand side");
  if (p.t_end == p.t0) throw InvalidInput("integrate: t_end must differ from t0");
  if (!p.y0.allFinite()) throw InvalidInput("integrate: non-finite initial state");
  if (with_settings) {
    if (!(s.rel_tol > 0.0 && s.rel_tol <= 1e-2) || !(s.abs_tol > 0.0 && s.abs_tol <= 1e-2)) {
      throw InvalidInput("integrate: tolerances must lie in (0, 1e-2]");
    }
  }
}

// Initial step-size heuristic from trial derivative evaluations.
double initial_step(const IvpProblem& p, const IntegrationSettings& s, const Vec& f0,
                    double dir, double span) {
  Vec scale = (s.abs_tol + s.rel_tol * p.y0.cwiseAbs().array()).matrix();
  const double d0 = rms_norm(p.y0.cwiseQuotient(scale));
  const double d1 = rms_norm(f0.cwiseQuotient(scale));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);

  Vec y1 = p.y0 + (dir * h0) * f0;
  Vec f1(p.dimension);
  p.rhs(p.t0 + dir * h0, y1, f1);
  double h1;
  if (!f1.allFinite()) {
    h1 = h0 * 1e-3;
  } else {
    const double d2 = rms_norm((f1 - f0).cwiseQuotient(scale)) / h0;
    const double d12 = std::max(d1, d2);
    h1 = (d12 <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / d12, 0.2);
  }
  return std::min({100.0 * h0, h1, span, s.max_step});
}

}  // namespace

Vec IvpSolution::interpolate(double t) const {
  if (times.size() < 1) throw InvalidInput("interpolate: empty solution");
  if (times.size() == 1) {
    if (t == times[0]) return states[0];
    throw InvalidInput("interpolate: time outside the solution span");
  }
  const bool forward = times.back() >= times.front();
  const double lo = std::min(times.front(), times.back());
  const double hi = std::max(times.front(), times.back());
  const double slack = 1e-12 * (hi - lo);
  if (t < lo - slack || t > hi + slack) {
    throw InvalidInput("interpolate: time outside the solution span");
  }

  // Interval index by binary search along integration progress.
  std::size_t a = 0, b = times.size() - 1;
  while (b - a > 1) {
    const std::size_t mid = (a + b) / 2;
    const bool before = forward ? (times[mid] <= t) : (times[mid] >= t);
    if (before) a = mid; else b = mid;
  }
  if (t == times[a]) return states[a];
  if (t == times[a + 1]) return states[a + 1];

  if (interp == Interp::quartic_step) {
    const double theta = std::clamp((t - times[a]) / step_span[a], 0.0, 1.0);
    Eigen::Vector4d powers(theta, theta * theta, theta * theta * theta,
                           theta * theta * theta * theta);
    return states[a] + step_poly[a] * powers;
  }

  const double h = times[a + 1] - times[a];
  const double s = std::clamp((t - times[a]) / h, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * states[a] + ((s3 - 2 * s2 + s) * h) * node_derivs[a] +
         (-2 * s3 + 3 * s2) * states[a + 1] + ((s3 - s2) * h) * node_derivs[a + 1];
}

IvpResult integrate(const IvpProblem& problem, const IntegrationSettings& settings,
                    const std::vector<EventSpec>& events) {
  check_problem(problem, true, settings);
  for (const auto& ev : events) {
    if (!ev.event_fn) throw InvalidInput("integrate: event without a function");
  }

  const Eigen::Index dim = problem.dimension;
  const double dir = problem.t_end > problem.t0 ? 1.0 : -1.0;
  const double span = std::abs(problem.t_end - problem.t0);
  const double event_tol = 1e-12 * span;

  IvpResult result;
  IvpSolution& sol = result.solution;
  sol.interp = IvpSolution::Interp::quartic_step;
  sol.times.push_back(problem.t0);
  sol.states.push_back(problem.y0);

  Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  Vec y = problem.y0;
  double t = problem.t0;

  auto eval = [&](double tt, const Vec& yy, Vec& out) {
    problem.rhs(tt, yy, out);
    ++sol.step_stats.rhs_evals;
  };

  eval(t, y, k1);
  if (!k1.allFinite()) {
    throw IntegrationError("integrate: non-finite right-hand side at the initial state", t, y);
  }
  double h = initial_step(problem, settings, k1, dir, span);
  sol.step_stats.rhs_evals += 1;  // trial evaluation inside initial_step

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].event_fn(t, y);

  Vec y_new(dim), err(dim), scale(dim), y_stage(dim);
  bool done = false;
  while (!done) {
    if (sol.step_stats.accepted + sol.step_stats.rejected >= settings.max_steps) {
      throw IntegrationError("integrate: step budget exhausted", t, y);
    }
    const double remaining = std::abs(problem.t_end - t);
    bool last_step = false;
    if (h >= remaining) {
      h = remaining;
      last_step = true;
    }
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(t), span);
    if (h < h_floor && !last_step) {
      throw IntegrationError("integrate: step size underflow", t, y);
    }

    const double hs = dir * h;
    y_stage = y + hs * (a21 * k1);
    eval(t + c2 * hs, y_stage, k2);
    y_stage = y + hs * (a31 * k1 + a32 * k2);
    eval(t + c3 * hs, y_stage, k3);
    y_stage = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(t + c4 * hs, y_stage, k4);
    y_stage = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(t + c5 * hs, y_stage, k5);
    y_stage = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    eval(t + hs, y_stage, k6);
    y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = last_step ? problem.t_end : t + hs;
    eval(t_new, y_new, k7);

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    scale = (settings.abs_tol +
             settings.rel_tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array())
                .matrix();
    const double err_norm = rms_norm(err.cwiseQuotient(scale));

    if (!std::isfinite(err_norm) || !y_new.allFinite()) {
      ++sol.step_stats.rejected;
      h *= 0.25;
      continue;
    }
    if (err_norm > 1.0) {
      ++sol.step_stats.rejected;
      h *= std::max(kMinFactor, kSafety * std::pow(err_norm, kErrorExponent));
      continue;
    }

    // Accepted. Build the dense polynomial for this step.
    Mat K(dim, 7);
    K.col(0) = k1; K.col(1) = k2; K.col(2) = k3; K.col(3) = k4;
    K.col(4) = k5; K.col(5) = k6; K.col(6) = k7;
    Mat Q(dim, 4);
    for (int j = 0; j < 4; ++j) {
      Vec col = Vec::Zero(dim);
      for (int i = 0; i < 7; ++i) col += kDense[i][j] * K.col(i);
      Q.col(j) = hs * col;
    }

    sol.times.push_back(t_new);
    sol.states.push_back(y_new);
    sol.step_poly.push_back(Q);
    sol.step_span.push_back(t_new - t);
    ++sol.step_stats.accepted;

    // Event detection on this step via the fresh dense polynomial.
    auto dense_here = [&](double tt) -> Vec {
      const double theta = std::clamp((tt - t) / (t_new - t), 0.0, 1.0);
      Eigen::Vector4d powers(theta, theta * theta, theta * theta * theta,
                             theta * theta * theta * theta);
      return sol.states[sol.states.size() - 2] + Q * powers;
    };

    struct LocalHit { int index; double time; };
    std::vector<LocalHit> hits;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double ga = g_prev[e];
      const double gb = events[e].event_fn(t_new, y_new);
      const EventDirection d = events[e].direction;
      const bool rising = ga < 0.0 && gb >= 0.0;
      const bool falling = ga > 0.0 && gb <= 0.0;
      const bool triggered = (d == EventDirection::rising && rising) ||
                             (d == EventDirection::falling && falling) ||
                             (d == EventDirection::any && (rising || falling));
      g_prev[e] = gb;
      if (!triggered) continue;

      // Bisect for the first parameter where g reaches the far-side sign.
      double ta = t, tb = t_new;
      for (int iter = 0; iter < 200 && std::abs(tb - ta) > 0.25 * event_tol; ++iter) {
        const double tm = 0.5 * (ta + tb);
        const double gm = events[e].event_fn(tm, dense_here(tm));
        const bool same_side_as_start = rising ? (gm < 0.0) : (gm > 0.0);
        if (same_side_as_start) ta = tm; else tb = tm;
      }
      hits.push_back({static_cast<int>(e), tb});
    }
    std::sort(hits.begin(), hits.end(), [&](const LocalHit& a, const LocalHit& b) {
      return dir * a.time < dir * b.time;
    });

    for (const LocalHit& hit : hits) {
      Vec state = dense_here(hit.time);
      result.events.push_back({hit.index, hit.time, state});
      if (events[hit.index].terminal) {
        // Truncate the accepted node to the event; the step polynomial keeps
        // its original parameterization width.
        sol.times.back() = hit.time;
        sol.states.back() = state;
        done = true;
        break;
      }
    }
    if (done) break;

    t = t_new;
    y = y_new;
    k1 = k7;  // first-same-as-last
    if (last_step) break;

    const double factor = (err_norm == 0.0)
                              ? kMaxFactor
                              : std::min(kMaxFactor, kSafety * std::pow(err_norm, kErrorExponent));
    h = std::min(h * factor, settings.max_step);
  }
  return result;
}

IvpSolution integrate_fixed(const IvpProblem& problem, long n_steps) {
  check_problem(problem, false, {});
  if (n_steps < 1) throw InvalidInput("integrate_fixed: need at least one step");

  const Eigen::Index dim = problem.dimension;
  IvpSolution sol;
  sol.interp = IvpSolution::Interp::hermite_nodes;
  sol.times.reserve(n_steps + 1);
  sol.states.reserve(n_steps + 1);
  sol.node_derivs.reserve(n_steps + 1);

  Vec y = problem.y0;
  Vec k1(dim), k2(dim), k3(dim), k4(dim), y_stage(dim);
  double t = problem.t0;

  problem.rhs(t, y, k1);
  if (!k1.allFinite()) {
    throw IntegrationError("integrate_fixed: non-finite right-hand side", t, y);
  }
  sol.times.push_back(t);
  sol.states.push_back(y);
  sol.node_derivs.push_back(k1);
  sol.step_stats.rhs_evals = 1;

  for (long i = 0; i < n_steps; ++i) {
    const double t_next =
        problem.t0 + (problem.t_end - problem.t0) *
                         (static_cast<double>(i + 1) / static_cast<double>(n_steps));
    const double h = t_next - t;
    problem.rhs(t + 0.5 * h, y + (0.5 * h) * k1, k2);
    problem.rhs(t + 0.5 * h, y + (0.5 * h) * k2, k3);
    problem.rhs(t_next, y + h * k3, k4);
    y += h * ((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
    t = t_next;
    if (!y.allFinite()) {
      throw IntegrationError("integrate_fixed: non-finite state", sol.times.back(),
                             sol.states.back());
    }
    problem.rhs(t, y, k1);
    if (!k1.allFinite()) {
      throw IntegrationError("integrate_fixed: non-finite right-hand side", t, y);
    }
    sol.step_stats.rhs_evals += 4;
    ++sol.step_stats.accepted;
    sol.times.push_back(t);
    sol.states.push_back(y);
    sol.node_derivs.push_back(k1);
  }
  return sol;
}

}  // namespace csf
