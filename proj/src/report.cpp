#include "qhf/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qhf {

std::string series_csv_text(const MomentSeries& ms, const CumulantSeries& cs,
                            bool current_columns) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t";
  for (int n = 1; n <= ms.n_max; ++n) os << ",m" << n;
  for (int n = 1; n <= ms.n_max; ++n) os << ",c" << n;
  if (current_columns)
    for (int n = 1; n <= ms.n_max; ++n) os << ",j" << n;
  os << ",fano,discarded_weight\n";

  auto put = [&os](double v) {
    if (std::isnan(v)) os << ",nan";
    else os << "," << v;
  };

  std::size_t ci = 0;
  for (std::size_t i = 0; i < ms.times.size(); ++i) {
    const double t = ms.times[i];
    // current series drop the t = 0 row (J undefined there)
    while (ci < cs.times.size() && cs.times[ci] < t - 1e-12) ++ci;
    const bool has_c = ci < cs.times.size() && std::abs(cs.times[ci] - t) <= 1e-12;
    if (current_columns && !has_c) continue;
    os << t;
    for (int n = 0; n < ms.n_max; ++n) put(ms.moments[i][n]);
    for (int n = 0; n < ms.n_max; ++n) put(has_c ? cs.cumulants[ci][n] : 0.0);
    if (current_columns)
      for (int n = 0; n < ms.n_max; ++n) put(cs.scaled[ci][n]);
    put(has_c ? cs.fano[ci] : std::numeric_limits<double>::quiet_NaN());
    put(ms.discarded_weight[i]);
    os << "\n";
  }
  return os.str();
}

void write_series_csv(const std::string& path, const MomentSeries& ms, const CumulantSeries& cs,
                      bool current_columns) {
  std::ofstream out(path);
  if (!out) throw numerics_error("cannot open CSV for writing: " + path);
  out << series_csv_text(ms, cs, current_columns);
}

namespace {

struct Bounds {
  double lo = 0.0, hi = 1.0;
};

Bounds nice_bounds(double lo, double hi) {
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::vector<double> ticks(const Bounds& b, int target = 5) {
  const double span = b.hi - b.lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(b.lo / step) * step; v <= b.hi + 1e-12 * span; v += step)
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return out;
}

std::string fmt_tick(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  const int width = 660, height = 420;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i]) || std::isnan(s.x[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (xlo > xhi) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }
  const Bounds bx = nice_bounds(xlo, xhi), by = nice_bounds(ylo, yhi);
  auto px = [&](double x) { return ml + (x - bx.lo) / (bx.hi - bx.lo) * plot_w; };
  auto py = [&](double y) { return mt + plot_h - (y - by.lo) / (by.hi - by.lo) * plot_h; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf"};

  std::ofstream out(path);
  if (!out) throw numerics_error("cannot open SVG for writing: " + path);
  out << std::setprecision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";

  for (double t : ticks(bx)) {
    out << "<line x1=\"" << px(t) << "\" y1=\"" << mt << "\" x2=\"" << px(t) << "\" y2=\""
        << mt + plot_h << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px(t) << "\" y=\"" << mt + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_tick(t)
        << "</text>\n";
  }
  for (double t : ticks(by)) {
    out << "<line x1=\"" << ml << "\" y1=\"" << py(t) << "\" x2=\"" << ml + plot_w << "\" y2=\""
        << py(t) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(t) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_tick(t)
        << "</text>\n";
  }
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 16 " << mt + plot_h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 7];
    std::ostringstream pts;
    bool pen_down = false;
    out << "<path d=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (std::isnan(series[s].y[i]) || std::isnan(series[s].x[i])) {
        pen_down = false;
        continue;
      }
      out << (pen_down ? "L" : "M") << px(series[s].x[i]) << " " << py(series[s].y[i]) << " ";
      pen_down = true;
    }
    out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
    const int ly = mt + 16 + 16 * static_cast<int>(s);
    out << "<line x1=\"" << ml + plot_w - 130 << "\" y1=\"" << ly << "\" x2=\""
        << ml + plot_w - 110 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + plot_w - 104 << "\" y=\"" << ly + 4
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace qhf
