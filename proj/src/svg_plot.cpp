#include "csf/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

namespace csf {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_polyline_svg(const std::string& path, const std::vector<Mat>& curves,
                        const SvgOptions& options) {
  if (curves.empty()) throw InvalidInput("svg: nothing to plot");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Mat& c : curves) {
    if (c.rows() != 2 || c.cols() < 2) throw InvalidInput("svg: curves must be 2 x N, N >= 2");
    xmin = std::min(xmin, c.row(0).minCoeff());
    xmax = std::max(xmax, c.row(0).maxCoeff());
    ymin = std::min(ymin, c.row(1).minCoeff());
    ymax = std::max(ymax, c.row(1).maxCoeff());
  }
  double w = xmax - xmin, h = ymax - ymin;
  if (w <= 0.0) w = 1.0;
  if (h <= 0.0) h = 1.0;
  const double mx = options.margin_frac * w;
  const double my = options.margin_frac * h;

  // SVG y points down; emit flipped y so the plot keeps the usual
  // orientation.
  const double vb_x = xmin - mx;
  const double vb_y = -(ymax + my);
  const double vb_w = w + 2.0 * mx;
  const double vb_h = h + 2.0 * my;
  const double height = options.width * vb_h / vb_w;
  const double stroke = 0.004 * std::max(vb_w, vb_h);

  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(options.width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"" << fmt(vb_x) << " " << fmt(vb_y)
      << " " << fmt(vb_w) << " " << fmt(vb_h) << "\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const Mat& c = curves[k];
    out << "  <polyline fill=\"none\" stroke=\""
        << kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\" stroke-width=\""
        << fmt(stroke) << "\" points=\"";
    for (Eigen::Index i = 0; i < c.cols(); ++i) {
      out << (i ? " " : "") << fmt(c(0, i)) << "," << fmt(-c(1, i));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace csf
