#pragma once

#include <map>
#include <string>
#include <vector>

namespace gks {

enum class PlotKind {
  Spectrum,  // re_lambda, im_lambda [, fit_re, fit_im]
  Orbit,     // u, ux, uxx
  Band,      // omega, max_re, stable [, classified]
  Heatmap,   // x, t, value (row-major in t)
  Decay,     // t, residual_Linf, residual_L2 [, fit_Linf, fit_L2]
};

const char* to_string(PlotKind kind);

struct Dataset {
  std::string title;
  std::map<std::string, std::vector<double>> columns;
  /// Optional view limits, e.g. x_min, x_max, y_min, y_max.
  std::map<std::string, double> limits;
};

/// Self-contained SVG on a fixed 640 x 480 canvas. Throws PlotSchema naming
/// the first missing or mis-sized column.
std::string emit_svg(const Dataset& data, PlotKind kind);

/// Panels laid out row by row, `columns` per row, under a common title.
std::string compose_svg(const std::vector<std::string>& panels, int columns, const std::string& title);

}  // namespace gks
