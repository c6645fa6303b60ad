#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "csf/types.hpp"

namespace csf {

/// First-order initial value problem y' = rhs(t, y) on [t0, t_end].
/// Integration direction is the sign of t_end - t0.
struct IvpProblem {
  Eigen::Index dimension = 0;
  std::function<void(double, const Vec&, Vec&)> rhs;
  double t0 = 0.0;
  Vec y0;
  double t_end = 0.0;
};

struct IntegrationSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

/// Accepted trajectory with dense output. interpolate() is valid on the
/// stored span and reproduces the stored states exactly at the nodes.
struct IvpSolution {
  std::vector<double> times;   // strictly monotone accepted-step times
  std::vector<Vec> states;
  StepStats step_stats;

  Vec interpolate(double t) const;
  Vec operator()(double t) const { return interpolate(t); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  // Dense representation. The adaptive path stores one quartic polynomial
  // per step (coefficients include the step-size factor); the fixed-step
  // path stores node derivatives and interpolates with cubic Hermite.
  enum class Interp { quartic_step, hermite_nodes };
  Interp interp = Interp::quartic_step;
  std::vector<Mat> step_poly;     // per interval, dimension x 4
  std::vector<double> step_span;  // parameterization width of each interval
  std::vector<Vec> node_derivs;   // per node (hermite only)
};

enum class EventDirection { rising, falling, any };

/// Scalar event g(t, y); a zero crossing in the requested direction (along
/// integration progress) is located by bisection on the dense output to
/// 1e-12 * |t_end - t0|. Terminal events truncate the solution.
struct EventSpec {
  std::function<double(double, const Vec&)> event_fn;
  EventDirection direction = EventDirection::any;
  bool terminal = false;
};

struct EventHit {
  int event_index;
  double time;
  Vec state;
};

struct IvpResult {
  IvpSolution solution;
  std::vector<EventHit> events;
};

/// Adaptive embedded Runge-Kutta 5(4) pair with quartic dense output and
/// event location. Throws IntegrationError on step-size underflow or a
/// non-finite right-hand side, carrying the last good time and state.
IvpResult integrate(const IvpProblem& problem,
                    const IntegrationSettings& settings = {},
                    const std::vector<EventSpec>& events = {});

/// Classical fixed-step 4th-order method on n_steps equal intervals,
/// kept as an independent cross-check of the adaptive path.
IvpSolution integrate_fixed(const IvpProblem& problem, long n_steps);

}  // namespace csf
