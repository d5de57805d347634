#pragma once

#include <string>
#include <vector>

#include "ikzm/record.hpp"
#include "ikzm/sweep.hpp"

namespace ikzm {

struct FigurePaths {
  std::string data_path;
  std::string svg_path;
};

// Each figure writes two siblings of out_base: a plain CSV with documented
// columns and a self-contained SVG. Empty inputs are hard errors.

// Kink density over scaled time t/tau_Q, one raster row per ramp time,
// with a dashed marker at the homogeneous critical time t_c(0) = 0.
FigurePaths figure_heatmap(const std::vector<QuenchRecord>& records, const std::string& out_base);

// Log-log final density against tau_Q per series, with power-law fits
// (two-regime hinge for graded chains) and reference slope guides.
FigurePaths figure_scaling(const std::vector<CurveRow>& rows, const std::string& out_base);

// Fitted slow-branch exponent per q against the (q+1)/(2q-2) curve.
FigurePaths figure_exponents(const std::vector<CurveRow>& rows, const std::string& out_base);

// Flat versus graded density curves on shared axes.
FigurePaths figure_overlay(const std::vector<CurveRow>& rows, const std::string& out_base);

}  // namespace ikzm
