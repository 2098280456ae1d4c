#pragma once

#include <string>
#include <vector>

#include "qhf/stats.hpp"

namespace qhf {

/// Heat series CSV: t, m1..m_n, c1..c_n, fano, discarded_weight.
/// With scaled-current columns (two-bath Δ̃_Q series): j1..j_n inserted before
/// fano and the t = 0 row dropped. Column order is part of the contract.
void write_series_csv(const std::string& path, const MomentSeries& ms, const CumulantSeries& cs,
                      bool current_columns);

std::string series_csv_text(const MomentSeries& ms, const CumulantSeries& cs,
                            bool current_columns);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal self-rendered SVG line chart (axes, ticks, legend, one polyline per
/// series); NaN points are skipped.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace qhf
