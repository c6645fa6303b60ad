#pragma once

#include <string>

#include "csf/core_geometry.hpp"
#include "csf/csf_flow.hpp"
#include "csf/shrinker_planar.hpp"

namespace csf {

/// Full-precision decimal rendering of a double (round-trips exactly).
std::string format_full(double value);

/// Curve schema: header t,x,y,dx,dy,ddx,ddy (z columns appear for n = 3,
/// numbered columns x1..xn beyond that), one row per sample, 17 significant
/// digits.
void write_curve_csv(const std::string& path, const CurveSample& curve);
CurveSample read_curve_csv(const std::string& path);

/// Closure schema: alpha0,period,delta_theta,rotation_ratio,closure_gap,closed.
void write_closure_csv(const std::string& path, const std::vector<ClosureReport>& reports);

/// Snapshot schema: x,y (or x,y,z), one row per vertex.
void write_poly_csv(const std::string& path, const PolyCurve& curve);
PolyCurve read_poly_csv(const std::string& path, bool closed);

/// True when the file's header starts with a t column (curve schema).
bool is_curve_csv(const std::string& path);

}  // namespace csf
