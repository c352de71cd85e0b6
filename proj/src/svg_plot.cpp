#include <nsnpeak/svg_plot.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nsnpeak::svg {

namespace {

constexpr int kLeft = 70;
constexpr int kRight = 20;
constexpr int kTop = 30;
constexpr int kBottom = 45;
constexpr std::size_t kMaxPoints = 2000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += c;
    }
  }
  return out;
}

// Roughly five round-valued ticks covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::fabs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

struct Range {
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(hi > lo)) {
      const double w = std::max(std::fabs(lo), 1.0) * 0.5;
      lo -= w;
      hi += w;
    }
  }
};

void render_panel(std::ostringstream& os, const Panel& panel, int y0, int width,
                  int height) {
  const double plot_w = width - kLeft - kRight;
  const double plot_h = height - kTop - kBottom;
  auto fx = [&](double x) { return panel.log_x ? std::log10(x) : x; };

  Range xr, yr;
  for (const auto& s : panel.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!panel.log_x || s.x[k] > 0.0) {
        xr.add(fx(s.x[k]));
        yr.add(s.y[k]);
      }
    }
  }
  if (!(xr.lo <= xr.hi)) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  xr.pad();
  yr.pad();
  if (yr.lo > 0.0) {
    yr.lo = 0.0;
  }

  auto px = [&](double x) { return kLeft + (fx(x) - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return y0 + kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

  os << "<text x=\"" << width / 2 << "\" y=\"" << y0 + 18
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\""
     << num(plot_w) << "\" height=\"" << num(plot_h)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (double t : linear_ticks(yr.lo, yr.hi)) {
    os << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\""
       << num(py(t)) << "\" y2=\"" << num(py(t)) << "\" stroke=\"#333\"/>"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(t) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(t)
       << "</text>\n";
  }
  std::vector<double> xticks;
  if (panel.log_x) {
    for (double e = std::ceil(xr.lo); e <= xr.hi; e += 1.0) {
      xticks.push_back(std::pow(10.0, e));
    }
  } else {
    xticks = linear_ticks(xr.lo, xr.hi);
  }
  const double base = y0 + kTop + plot_h;
  for (double t : xticks) {
    os << "<line x1=\"" << num(px(t)) << "\" x2=\"" << num(px(t)) << "\" y1=\""
       << num(base) << "\" y2=\"" << num(base + 4) << "\" stroke=\"#333\"/>"
       << "<text x=\"" << num(px(t)) << "\" y=\"" << num(base + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << num(base + 34)
     << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(panel.x_label)
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << num(y0 + kTop + plot_h / 2)
     << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 "
     << num(y0 + kTop + plot_h / 2) << ")\">" << escape(panel.y_label)
     << "</text>\n";

  for (const auto& m : panel.markers) {
    if (panel.log_x && !(m.x > 0.0)) {
      continue;
    }
    os << "<line x1=\"" << num(px(m.x)) << "\" x2=\"" << num(px(m.x))
       << "\" y1=\"" << y0 + kTop << "\" y2=\"" << num(base)
       << "\" stroke=\"#888\" stroke-dasharray=\"3,3\"/>"
       << "<text x=\"" << num(px(m.x) + 3) << "\" y=\"" << y0 + kTop + 12
       << "\" font-size=\"10\" fill=\"#555\">" << escape(m.label) << "</text>\n";
  }

  int legend_row = 0;
  for (const auto& s : panel.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    os << "<polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,3\"" : "")
       << " points=\"";
    for (std::size_t k = 0; k < n; k += stride) {
      if (panel.log_x && !(s.x[k] > 0.0)) {
        continue;
      }
      os << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
    }
    if (n > 0 && (n - 1) % stride != 0) {
      os << num(px(s.x[n - 1])) << ',' << num(py(s.y[n - 1]));
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = y0 + kTop + 14 + 14 * legend_row++;
      os << "<line x1=\"" << num(kLeft + plot_w - 110) << "\" x2=\""
         << num(kLeft + plot_w - 90) << "\" y1=\"" << num(ly - 4) << "\" y2=\""
         << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>"
         << "<text x=\"" << num(kLeft + plot_w - 86) << "\" y=\"" << num(ly)
         << "\" font-size=\"10\">" << escape(s.label) << "</text>\n";
    }
  }
}

} // namespace

std::string render(const std::vector<Panel>& panels, int width,
                   int panel_height) {
  std::ostringstream os;
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
     << height << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    render_panel(os, panels[k], static_cast<int>(k) * panel_height, width,
                 panel_height);
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace nsnpeak::svg
