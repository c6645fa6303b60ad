// Command-line front end: reconstruct planar shrinkers/expanders, integrate
// spatial solitons, verify planarity, scan for closed curves, and evolve
// polygonal curves by the shortening flow. CSV output is bit-exact (17
// significant digits); SVG output is presentational.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csf/csf_flow.hpp"
#include "csf/csv_io.hpp"
#include "csf/expander_planar.hpp"
#include "csf/shrinker_planar.hpp"
#include "csf/soliton_nd.hpp"
#include "csf/svg_plot.hpp"

namespace {

using json = nlohmann::ordered_json;

csf::IntegrationSettings settings_from_env() {
  csf::IntegrationSettings s;
  if (const char* tol = std::getenv("CSF_TOL")) {
    char* end = nullptr;
    const double rel = std::strtod(tol, &end);
    if (end == tol || !(rel > 0.0 && rel <= 1e-2)) {
      throw csf::InvalidInput("CSF_TOL must be a relative tolerance in (0, 1e-2]");
    }
    s.rel_tol = rel;
    s.abs_tol = rel * 1e-2;
  }
  return s;
}

csf::Vec parse_vector(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw csf::InvalidInput("unparseable coordinate '" + cell + "'");
    parts.push_back(v);
  }
  if (parts.size() < 2) throw csf::InvalidInput("expected comma-separated coordinates");
  csf::Vec v(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) v(i) = parts[i];
  return v;
}

json plane_to_json(const csf::PlaneFit& plane) {
  auto vec = [](const csf::Vec& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return out;
  };
  return json{{"basepoint", vec(plane.basepoint)},
              {"basis1", vec(plane.basis1)},
              {"basis2", vec(plane.basis2)},
              {"max_residual", plane.max_residual},
              {"rms_residual", plane.rms_residual}};
}

csf::Mat projection(const csf::Mat& positions, const csf::Vec& ax, const csf::Vec& ay,
                    const csf::Vec& base) {
  csf::Mat out(2, positions.cols());
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    const csf::Vec c = positions.col(i) - base;
    out(0, i) = ax.dot(c);
    out(1, i) = ay.dot(c);
  }
  return out;
}

struct PlanarArgs {
  double alpha0 = 0.6;
  double dalpha0 = 0.0;
  int periods = 1;
  double span = 5.0;
  int orientation = 1;
  int samples = 1024;
  std::string csv_path;
  std::string svg_path;
};

int run_planar(const PlanarArgs& args, csf::SolitonKind kind) {
  const csf::IntegrationSettings st = settings_from_env();

  csf::AlphaSolution alpha;
  if (kind == csf::SolitonKind::shrinker) {
    csf::AlphaSolution probe = csf::solve_alpha_shrinker(args.alpha0, args.dalpha0, 40.0, st);
    double span = 40.0;
    if (probe.period) {
      span = args.periods * *probe.period;
    } else if (args.alpha0 == 1.0 && args.dalpha0 == 0.0) {
      span = args.periods * 2.0 * std::numbers::pi;  // circle closes in 2 pi
    }
    alpha = csf::solve_alpha_shrinker(args.alpha0, args.dalpha0, span, st);
  } else {
    alpha = csf::solve_alpha_expander(args.alpha0, args.dalpha0, args.span, st);
  }

  csf::PolarCurve curve =
      kind == csf::SolitonKind::shrinker
          ? csf::reconstruct_shrinker(alpha, 0.0, args.orientation, args.samples, st)
          : csf::reconstruct_expander(alpha, 0.0, args.orientation, args.samples, st);
  const double speed_defect = csf::arc_length_defect(curve.samples);
  if (speed_defect > 1e-4) {
    throw csf::NumericalError(
        "reconstruction lost arc-length accuracy (unit-speed defect " +
        csf::format_full(speed_defect) + "); tighten CSF_TOL or move alpha0 away from 0");
  }
  const csf::ResidualReport residual = kind == csf::SolitonKind::shrinker
                                           ? csf::shrinker_residual(curve.samples)
                                           : csf::expander_residual(curve.samples);

  json summary{{"kind", csf::to_string(kind)},
               {"alpha0", args.alpha0},
               {"dalpha0", args.dalpha0},
               {"orientation", args.orientation},
               {"samples", args.samples},
               {"max_residual", residual.max_residual},
               {"unit_speed_defect", speed_defect}};
  if (alpha.period) {
    summary["period"] = *alpha.period;
    const double dtheta = curve.theta(*alpha.period) - curve.theta(0.0);
    summary["delta_theta"] = dtheta;
    summary["rotation_ratio"] = dtheta / (2.0 * std::numbers::pi);
  } else {
    summary["period"] = nullptr;
  }

  if (!args.csv_path.empty()) {
    csf::write_curve_csv(args.csv_path, curve.samples);
    summary["csv"] = args.csv_path;
  }
  if (!args.svg_path.empty()) {
    csf::write_polyline_svg(args.svg_path, {curve.samples.positions});
    summary["svg"] = args.svg_path;
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar solutions of the curve shortening flow"};
  app.require_subcommand(1);

  PlanarArgs shrink_args;
  CLI::App* shrink2d = app.add_subcommand("shrink2d", "Reconstruct a planar self-shrinker");
  shrink2d->add_option("--alpha0", shrink_args.alpha0, "alpha(0), squared start radius")
      ->required()
      ->check(CLI::PositiveNumber);
  shrink2d->add_option("--dalpha0", shrink_args.dalpha0, "alpha'(0)");
  shrink2d->add_option("--periods", shrink_args.periods, "number of radial periods to cover")
      ->check(CLI::PositiveNumber);
  shrink2d->add_option("--orientation", shrink_args.orientation, "theta' sign branch, +1 or -1")
      ->check(CLI::IsMember({1, -1}));
  shrink2d->add_option("--samples", shrink_args.samples, "sample count")
      ->check(CLI::Range(16, 10'000'000));
  shrink2d->add_option("--csv", shrink_args.csv_path, "curve CSV output path");
  shrink2d->add_option("--svg", shrink_args.svg_path, "SVG plot output path");

  PlanarArgs expand_args;
  CLI::App* expand2d = app.add_subcommand("expand2d", "Reconstruct a planar self-expander");
  expand2d->add_option("--alpha0", expand_args.alpha0, "alpha(0)")
      ->required()
      ->check(CLI::PositiveNumber);
  expand2d->add_option("--dalpha0", expand_args.dalpha0, "alpha'(0)");
  expand2d->add_option("--span", expand_args.span, "parameter span [0, T]")
      ->check(CLI::PositiveNumber);
  expand2d->add_option("--orientation", expand_args.orientation, "theta' sign branch, +1 or -1")
      ->check(CLI::IsMember({1, -1}));
  expand2d->add_option("--samples", expand_args.samples, "sample count")
      ->check(CLI::Range(16, 10'000'000));
  expand2d->add_option("--csv", expand_args.csv_path, "curve CSV output path");
  expand2d->add_option("--svg", expand_args.svg_path, "SVG plot output path");

  std::string plot_kind = "shrinker";
  double plot_alpha0 = 0.6, plot_dalpha0 = 0.0, plot_span = 20.0;
  std::string plot_svg;
  CLI::App* alpha_plot = app.add_subcommand("alpha-plot", "Plot alpha(t) for either kind");
  alpha_plot->add_option("--kind", plot_kind)->check(CLI::IsMember({"shrinker", "expander"}));
  alpha_plot->add_option("--alpha0", plot_alpha0)->required()->check(CLI::PositiveNumber);
  alpha_plot->add_option("--dalpha0", plot_dalpha0);
  alpha_plot->add_option("--span", plot_span)->check(CLI::PositiveNumber);
  alpha_plot->add_option("--svg", plot_svg, "SVG output path")->required();

  std::string s3_p0 = "0.7745966692414834,0,0", s3_v0 = "0,1,0";
  double s3_span = 2.0 * std::numbers::pi;
  int s3_samples = 1001;
  std::string s3_csv, s3_svg;
  CLI::App* shrink3d = app.add_subcommand("shrink3d", "Integrate a spatial self-shrinker");
  shrink3d->add_option("--p0", s3_p0, "initial position x,y,z")->required();
  shrink3d->add_option("--v0", s3_v0, "initial tangent x,y,z (normalized)")->required();
  shrink3d->add_option("--span", s3_span)->check(CLI::PositiveNumber);
  shrink3d->add_option("--samples", s3_samples)->check(CLI::Range(5, 10'000'000));
  shrink3d->add_option("--csv", s3_csv, "curve CSV output path");
  shrink3d->add_option("--svg", s3_svg, "SVG output path (two orthographic projections)");

  std::string pl_input, pl_kind = "shrinker";
  CLI::App* planarity = app.add_subcommand("planarity", "Planarity report for a curve CSV");
  planarity->add_option("--input", pl_input, "curve CSV path")->required();
  planarity->add_option("--kind", pl_kind)->check(CLI::IsMember({"shrinker", "expander"}));

  double cs_from = 0.1, cs_to = 0.99;
  int cs_grid = 50, cs_qmax = 32;
  std::string cs_csv;
  CLI::App* closure = app.add_subcommand("closure-scan", "Scan alpha0 for closed shrinkers");
  closure->add_option("--from", cs_from)->required();
  closure->add_option("--to", cs_to)->required();
  closure->add_option("--grid", cs_grid)->check(CLI::Range(2, 100000));
  closure->add_option("--qmax", cs_qmax)->check(CLI::Range(1, 100000));
  closure->add_option("--csv", cs_csv, "closure table output path");

  std::string ev_input, ev_outdir;
  double ev_tend = 0.3, ev_dtmax = 1e-3;
  int ev_vertices = 0;
  bool ev_rescale = false, ev_no_resample = false;
  std::optional<bool> ev_closed;
  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Evolve a polygonal curve by the flow");
  evolve_cmd->add_option("--input", ev_input, "curve or snapshot CSV path")->required();
  evolve_cmd->add_option("--tend", ev_tend)->required()->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--vertices", ev_vertices, "resample the input to N vertices");
  evolve_cmd->add_option("--dtmax", ev_dtmax)->check(CLI::PositiveNumber);
  evolve_cmd->add_flag("--rescale-homothety", ev_rescale,
                       "also emit areas rescaled by 1/sqrt(1-2t)");
  evolve_cmd->add_flag("--no-resample", ev_no_resample, "disable per-step resampling");
  evolve_cmd->add_flag("--closed,!--open",
                       [&ev_closed](std::int64_t count) { ev_closed = count > 0; },
                       "treat the input as closed (default: detect)");
  evolve_cmd->add_option("--outdir", ev_outdir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (shrink2d->parsed()) return run_planar(shrink_args, csf::SolitonKind::shrinker);
    if (expand2d->parsed()) return run_planar(expand_args, csf::SolitonKind::expander);

    const csf::IntegrationSettings st = settings_from_env();

    if (alpha_plot->parsed()) {
      const bool shr = plot_kind == "shrinker";
      csf::AlphaSolution alpha =
          shr ? csf::solve_alpha_shrinker(plot_alpha0, plot_dalpha0, plot_span, st)
              : csf::solve_alpha_expander(plot_alpha0, plot_dalpha0, plot_span, st);
      const int n = 1000;
      csf::Mat graph(2, n);
      double min_alpha = std::numeric_limits<double>::infinity(), max_alpha = -min_alpha;
      for (int i = 0; i < n; ++i) {
        const double t = alpha.solution.t_begin() +
                         (alpha.solution.t_end() - alpha.solution.t_begin()) * i / (n - 1.0);
        graph(0, i) = t;
        graph(1, i) = alpha.alpha_at(t);
        min_alpha = std::min(min_alpha, graph(1, i));
        max_alpha = std::max(max_alpha, graph(1, i));
      }
      csf::write_polyline_svg(plot_svg, {graph});
      json summary{{"kind", plot_kind},       {"alpha0", plot_alpha0},
                   {"span", plot_span},       {"min_alpha", min_alpha},
                   {"max_alpha", max_alpha},  {"svg", plot_svg}};
      if (alpha.period) summary["period"] = *alpha.period;
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    if (shrink3d->parsed()) {
      csf::SolitonSpec spec;
      spec.kind = csf::SolitonKind::shrinker;
      spec.p0 = parse_vector(s3_p0);
      spec.v0 = parse_vector(s3_v0);
      if (spec.p0.size() != 3 || spec.v0.size() != 3) {
        throw csf::InvalidInput("shrink3d: p0 and v0 must have 3 coordinates");
      }
      if (!(spec.v0.norm() > 0.0)) throw csf::InvalidInput("shrink3d: v0 must be nonzero");
      spec.v0.normalize();
      spec.dimension = 3;
      spec.t_span = s3_span;
      spec.settings.integration = st;
      spec.settings.n_samples = s3_samples;

      const csf::CurveSample curve = csf::integrate_soliton(spec);
      const csf::SphericalResiduals sob = csf::spherical_residuals(curve);
      const csf::PlaneFit plane = csf::fit_plane(curve);

      json summary{{"spherical",
                    {{"res_radial", sob.res_radial},
                     {"res_theta", sob.res_theta},
                     {"res_phi", sob.res_phi},
                     {"res_speed", sob.res_speed},
                     {"skipped", sob.skipped}}},
                   {"plane", plane_to_json(plane)},
                   {"unit_speed_defect", csf::arc_length_defect(curve)}};
      if (!s3_csv.empty()) {
        csf::write_curve_csv(s3_csv, curve);
        summary["csv"] = s3_csv;
      }
      if (!s3_svg.empty()) {
        // Two orthographic projections after principal-axis alignment:
        // in-plane view and edge-on view, laid out side by side.
        const Eigen::Vector3d b1 = plane.basis1, b2 = plane.basis2;
        const csf::Vec normal = b1.cross(b2);
        csf::Mat in_plane = projection(curve.positions, plane.basis1, plane.basis2,
                                       plane.basepoint);
        csf::Mat edge_on = projection(curve.positions, plane.basis1, normal, plane.basepoint);
        const double shift = (in_plane.row(0).maxCoeff() - in_plane.row(0).minCoeff()) * 1.15 +
                             (edge_on.row(0).maxCoeff() - edge_on.row(0).minCoeff()) * 0.075;
        edge_on.row(0).array() += in_plane.row(0).maxCoeff() - edge_on.row(0).minCoeff() + shift;
        csf::write_polyline_svg(s3_svg, {in_plane, edge_on});
        summary["svg"] = s3_svg;
      }
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    if (planarity->parsed()) {
      const csf::CurveSample curve = csf::read_curve_csv(pl_input);
      const csf::SolitonKind kind = pl_kind == "shrinker" ? csf::SolitonKind::shrinker
                                                          : csf::SolitonKind::expander;
      const csf::PlanarityReport report = csf::verify_planarity(curve, kind, st);
      json rs = json::array();
      for (const auto& traj : report.rs_solutions) {
        json item{{"initial", {traj.r0, traj.s0}}, {"v_drift", traj.v_drift}};
        item["t"] = std::vector<double>(traj.t.data(), traj.t.data() + traj.t.size());
        item["r"] = std::vector<double>(traj.r.data(), traj.r.data() + traj.r.size());
        item["s"] = std::vector<double>(traj.s.data(), traj.s.data() + traj.s.size());
        rs.push_back(std::move(item));
      }
      json out{{"rs_solutions", std::move(rs)},
               {"v_drift", report.v_drift},
               {"plane", plane_to_json(report.plane)},
               {"spanned_by_initial", report.spanned_by_initial},
               {"degenerate_line", report.degenerate_line}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (closure->parsed()) {
      const csf::ClosureScan scan = csf::closure_scan(cs_from, cs_to, cs_grid, cs_qmax, st);
      if (!cs_csv.empty()) csf::write_closure_csv(cs_csv, scan.reports);
      json out{{"grid", cs_grid},
               {"monotone", scan.rotation_ratio_monotone},
               {"n_failed", scan.n_failed}};
      if (!cs_csv.empty()) out["csv"] = cs_csv;
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (evolve_cmd->parsed()) {
      csf::PolyCurve poly;
      if (csf::is_curve_csv(ev_input)) {
        const csf::CurveSample curve = csf::read_curve_csv(ev_input);
        poly.vertices = curve.positions;
        poly.closed = true;
      } else {
        poly = csf::read_poly_csv(ev_input, true);
      }
      {
        const double diam = csf::curve_diameter(poly.vertices);
        const double gap =
            (poly.vertices.col(poly.size() - 1) - poly.vertices.col(0)).norm();
        poly.closed = ev_closed ? *ev_closed : gap <= 1e-3 * diam;
        if (poly.closed && gap <= 1e-9 * std::max(1.0, diam)) {
          // Drop a duplicated final vertex before closing the loop.
          poly.vertices.conservativeResize(Eigen::NoChange, poly.size() - 1);
        }
      }
      if (ev_vertices > 0 && poly.closed) {
        poly = csf::resample_uniform(poly, ev_vertices);
      }
      poly.validate();

      const csf::FlowRun run = csf::evolve(poly, ev_tend, ev_dtmax, !ev_no_resample);

      std::filesystem::create_directories(ev_outdir);
      json manifest;
      manifest["status"] = run.status == csf::FlowStatus::completed
                               ? "completed"
                               : (run.status == csf::FlowStatus::extinct ? "extinct" : "failed");
      manifest["closed"] = poly.closed;
      manifest["times"] = run.times;
      manifest["lengths"] = run.lengths;
      manifest["areas"] = run.areas;
      std::vector<std::string> files;
      for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.csv", i);
        const std::string rel = name;
        csf::write_poly_csv((std::filesystem::path(ev_outdir) / rel).string(),
                            run.snapshots[i]);
        files.push_back(rel);
      }
      manifest["snapshots"] = files;
      if (ev_rescale) {
        const auto rescaled = csf::rescaled_flow_area(
            run, [](double t) { return 1.0 / std::sqrt(1.0 - 2.0 * t); });
        json arr = json::array();
        for (const auto& [t, a] : rescaled) arr.push_back({{"time", t}, {"area", a}});
        manifest["rescaled_areas"] = std::move(arr);
      }
      std::ofstream mf(std::filesystem::path(ev_outdir) / "manifest.json");
      if (!mf) throw csf::InvalidInput("cannot write manifest in " + ev_outdir);
      mf << manifest.dump(2) << "\n";
      std::cout << manifest["status"].get<std::string>() << ": " << run.times.size()
                << " snapshots in " << ev_outdir << "\n";
      return 0;
    }
  } catch (const csf::InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const csf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
