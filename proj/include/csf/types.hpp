#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace csf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class SolitonKind { shrinker, expander };

inline const char* to_string(SolitonKind k) {
  return k == SolitonKind::shrinker ? "shrinker" : "expander";
}

/// Violated precondition or malformed input (CLI exit code 2).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base class of all runtime numerical failures (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step-size underflow or non-finite right-hand side. Carries the last
/// state the integrator could still trust.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double last_time, Vec last_state)
      : NumericalError(what), last_time_(last_time), last_state_(std::move(last_state)) {}

  double last_time() const { return last_time_; }
  const Vec& last_state() const { return last_state_; }

 private:
  double last_time_;
  Vec last_state_;
};

/// The radial solution left the positive regime required by the polar
/// reduction; carries the zero-crossing time.
class PositivityError : public NumericalError {
 public:
  PositivityError(const std::string& what, double crossing_time)
      : NumericalError(what), crossing_time_(crossing_time) {}

  double crossing_time() const { return crossing_time_; }

 private:
  double crossing_time_;
};

/// A quantity left its mathematical domain (square root of a negative
/// speed defect, rescaling factor past its pole, ...).
class DomainError : public NumericalError {
 public:
  DomainError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace csf
