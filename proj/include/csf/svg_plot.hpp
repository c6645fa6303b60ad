#pragma once

#include <string>
#include <vector>

#include "csf/types.hpp"

namespace csf {

struct SvgOptions {
  double width = 720.0;        // pixel width; height follows the aspect ratio
  double margin_frac = 0.05;   // margin around the data bounding box
};

/// Writes one polyline per 2 x N curve into an SVG whose viewBox is fitted
/// to the joint bounding box plus the margin. Presentational output only;
/// the CSV files are the precise surface.
void write_polyline_svg(const std::string& path, const std::vector<Mat>& curves,
                        const SvgOptions& options = {});

}  // namespace csf
