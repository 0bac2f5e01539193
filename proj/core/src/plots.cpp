#include "irsfd/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace irsfd {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 230, kTop = 30, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_sweep_svg(const SweepResult& result, std::ostream* log) {
  std::vector<const Series*> shown;
  for (const Series& s : result.series) {
    if (s.points.empty()) {
      if (log) *log << "warning: series '" << s.label << "' has no points, not plotted\n";
      continue;
    }
    shown.push_back(&s);
  }
  if (shown.empty()) throw ConfigError("render_sweep_svg: result has no points to plot");

  const bool log_x = result.sweep == SweepKind::rho;
  auto tx = [&](double x) { return log_x ? std::log10(std::max(x, 1e-12)) : x; };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = 0.0;
  for (const Series* s : shown) {
    for (const SeriesPoint& p : s->points) {
      x_lo = std::min(x_lo, tx(p.x));
      x_hi = std::max(x_hi, tx(p.x));
      y_lo = std::min(y_lo, p.mean - 2.0 * p.std_error);
      y_hi = std::max(y_hi, p.mean + 2.0 * p.std_error);
    }
  }
  if (x_hi - x_lo < 1e-12) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks at the sweep points of the first series, y ticks at 5 levels.
  for (const SeriesPoint& p : shown.front()->points) {
    const double x = px(p.x);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + ph << "\" x2=\"" << num(x) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << tick_label(p.x) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = y_lo + (y_hi - y_lo) * i / 5.0;
    const double y = py(v);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << num(y) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << tick_label(std::round(v * 100.0) / 100.0) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << (log_x ? "rho (log scale)" : "SNR [dB]") << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">Average WSR [bits/s/Hz]</text>\n";

  for (std::size_t k = 0; k < shown.size(); ++k) {
    const Series& s = *shown[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const char* dash = s.analytical ? " stroke-dasharray=\"6,4\"" : "";
    if (s.points.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash
         << " points=\"";
      for (const SeriesPoint& p : s.points) os << num(px(p.x)) << "," << num(py(p.mean)) << " ";
      os << "\"/>\n";
    }
    for (const SeriesPoint& p : s.points) {
      const double x = px(p.x);
      if (p.std_error > 0.0) {
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(p.mean - 2 * p.std_error))
           << "\" x2=\"" << num(x) << "\" y2=\"" << num(py(p.mean + 2 * p.std_error))
           << "\" stroke=\"" << color << "\"/>\n";
      }
      os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(p.mean)) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * k;
    const double lx = kLeft + pw + 15;
    os << "<line x1=\"" << lx << "\" y1=\"" << num(ly) << "\" x2=\"" << lx + 20 << "\" y2=\""
       << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << "/>\n";
    os << "<text x=\"" << lx + 26 << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plots(const SweepResult& result, const std::filesystem::path& out_dir, std::ostream* log) {
  write_text_file(out_dir / "sweep.svg", render_sweep_svg(result, log));
}

}  // namespace irsfd
