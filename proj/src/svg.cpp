#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "text_format.hpp"

namespace graspaff::detail {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 60;

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string f(double v) { return format_fixed(v, 2); }

void header(std::ostringstream& os, const std::string& title, const std::string& x_label, const std::string& y_label) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n"
     << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2
     << ")\">" << escape(y_label) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& fr, bool x_ticks) {
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
     << kHeight - kBottom << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = fr.y0 + (fr.y1 - fr.y0) * i / 5.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << f(fr.py(y) + 4) << "\" text-anchor=\"end\">"
       << format_fixed(y, 3) << "</text>\n";
  }
  if (!x_ticks) return;
  for (int i = 0; i <= 5; ++i) {
    const double x = fr.x0 + (fr.x1 - fr.x0) * i / 5.0;
    os << "<text x=\"" << f(fr.px(x)) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << format_fixed(x, 3) << "</text>\n";
  }
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string svg_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars,
                          double y_min, double y_max) {
  std::ostringstream os;
  header(os, title, "method", y_label);
  const Frame fr{0.0, static_cast<double>(std::max<std::size_t>(bars.size(), 1)), y_min, y_max};
  axes(os, fr, false);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double x = fr.px(static_cast<double>(i) + 0.15);
    const double w = fr.px(static_cast<double>(i) + 0.85) - x;
    const double top = fr.py(std::clamp(b.value, y_min, y_max));
    os << "<rect x=\"" << f(x) << "\" y=\"" << f(top) << "\" width=\"" << f(w) << "\" height=\""
       << f(fr.py(y_min) - top) << "\" fill=\"#4878a8\"/>\n";
    const double cx = x + w / 2;
    os << "<line x1=\"" << f(cx) << "\" y1=\"" << f(fr.py(std::clamp(b.value - b.error, y_min, y_max))) << "\" x2=\""
       << f(cx) << "\" y2=\"" << f(fr.py(std::clamp(b.value + b.error, y_min, y_max)))
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << f(cx) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << escape(b.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<Point>& points) {
  double xl = 0, xh = 1, yl = 0, yh = 1;
  if (!points.empty()) {
    const auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                                  [](const Point& a, const Point& b) { return a.x < b.x; });
    const auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                                  [](const Point& a, const Point& b) { return a.y < b.y; });
    std::tie(xl, xh) = padded_range(xmin->x, xmax->x);
    std::tie(yl, yh) = padded_range(ymin->y, ymax->y);
  }
  std::ostringstream os;
  header(os, title, x_label, y_label);
  const Frame fr{xl, xh, yl, yh};
  axes(os, fr, true);
  for (const auto& p : points) {
    os << "<circle cx=\"" << f(fr.px(p.x)) << "\" cy=\"" << f(fr.py(p.y)) << "\" r=\"3\" fill=\"#c44e52\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_line(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Point>& points, const std::vector<double>& errors, bool log_x) {
  std::vector<Point> mapped = points;
  if (log_x) {
    for (auto& p : mapped) p.x = std::log10(std::max(p.x, 1e-12));
  }
  double xl = 0, xh = 1, yl = 0, yh = 1;
  if (!mapped.empty()) {
    xl = mapped.front().x;
    xh = mapped.back().x;
    std::tie(xl, xh) = padded_range(xl, xh);
    double lo = mapped.front().y, hi = mapped.front().y;
    for (std::size_t i = 0; i < mapped.size(); ++i) {
      const double e = i < errors.size() ? errors[i] : 0.0;
      lo = std::min(lo, mapped[i].y - e);
      hi = std::max(hi, mapped[i].y + e);
    }
    std::tie(yl, yh) = padded_range(lo, hi);
  }
  std::ostringstream os;
  header(os, title, log_x ? x_label + " (log10)" : x_label, y_label);
  const Frame fr{xl, xh, yl, yh};
  axes(os, fr, true);
  std::string path;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    path += (i == 0 ? "M" : " L") + f(fr.px(mapped[i].x)) + " " + f(fr.py(mapped[i].y));
    const double e = i < errors.size() ? errors[i] : 0.0;
    os << "<line x1=\"" << f(fr.px(mapped[i].x)) << "\" y1=\"" << f(fr.py(mapped[i].y - e)) << "\" x2=\""
       << f(fr.px(mapped[i].x)) << "\" y2=\"" << f(fr.py(mapped[i].y + e)) << "\" stroke=\"black\"/>\n";
    os << "<circle cx=\"" << f(fr.px(mapped[i].x)) << "\" cy=\"" << f(fr.py(mapped[i].y))
       << "\" r=\"3\" fill=\"#4878a8\"/>\n";
  }
  if (!path.empty()) os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"#4878a8\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace graspaff::detail
