#include "vda/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace vda::cli {

namespace {

constexpr double kWidth = 640, kHeight = 480, kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo, hi;
  Axis(double a, double b) : lo(a), hi(b) {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
  }
  double to_x(double v) const { return kLeft + (v - lo) / (hi - lo) * (kWidth - kLeft - kRight); }
  double to_y(double v) const { return kHeight - kBottom - (v - lo) / (hi - lo) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << escape(title) << "</text>\n"
     << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
     << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void legend_entry(std::ostringstream& os, std::size_t i, const std::string& color, const std::string& text) {
  const double y = kTop + 14 + 16 * static_cast<double>(i);
  os << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
     << "\"/>\n<text x=\"" << kWidth - kRight + 28 << "\" y=\"" << y
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(text) << "</text>\n";
}

std::pair<double, double> range(const std::vector<double>& v) {
  double lo = INFINITY, hi = -INFINITY;
  for (double x : v)
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

}  // namespace

std::string scatter_svg(const metrics::Matrix& xy, const std::vector<int>& labels, const std::string& title,
                        const std::string& legend_name) {
  std::vector<double> xs(xy.rows), ys(xy.rows);
  for (std::size_t r = 0; r < xy.rows; ++r) {
    xs[r] = xy.at(r, 0);
    ys[r] = xy.cols > 1 ? xy.at(r, 1) : 0.0;
  }
  const auto [x0, x1] = range(xs);
  const auto [y0, y1] = range(ys);
  const Axis ax(x0, x1), ay(y0, y1);
  std::map<int, std::size_t> colour;
  for (int l : labels) colour.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [l, c] : colour) c = next++;

  std::ostringstream os;
  header(os, title);
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">PC1</text>\n"
     << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
     << "\" font-family=\"sans-serif\" font-size=\"12\">PC2</text>\n<g>\n";
  for (std::size_t r = 0; r < xy.rows; ++r) {
    const char* c = kPalette[colour[labels[r]] % std::size(kPalette)];
    os << "<circle class=\"marker\" cx=\"" << fmt(ax.to_x(xs[r])) << "\" cy=\"" << fmt(ay.to_y(ys[r]))
       << "\" r=\"2.5\" fill=\"" << c << "\" fill-opacity=\"0.7\"/>\n";
  }
  os << "</g>\n";
  legend_entry(os, 0, "none", legend_name);
  for (const auto& [l, c] : colour) {
    if (c >= 20) {
      legend_entry(os, 21, "none", "...");
      break;
    }
    legend_entry(os, c + 1, kPalette[c % std::size(kPalette)], std::to_string(l));
  }
  os << "</svg>\n";
  return os.str();
}

std::string line_plot_svg(const std::vector<double>& x, const std::vector<Curve>& curves, const std::string& title,
                          const std::string& x_label) {
  std::vector<double> all;
  for (const auto& c : curves) all.insert(all.end(), c.y.begin(), c.y.end());
  const auto [x0, x1] = range(x);
  const auto [y0, y1] = range(all);
  const Axis ax(x0, x1), ay(y0, y1);
  std::ostringstream os;
  header(os, title);
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label) << "</text>\n"
     << "<text x=\"" << kLeft - 5 << "\" y=\"" << ay.to_y(y0) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        "font-size=\"10\">" << fmt(y0) << "</text>\n"
     << "<text x=\"" << kLeft - 5 << "\" y=\"" << ay.to_y(y1) + 10
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(y1) << "</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* colour = kPalette[c % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(x.size(), curves[c].y.size()); ++i) {
      if (!std::isfinite(curves[c].y[i])) continue;
      os << (i ? " " : "") << fmt(ax.to_x(x[i])) << ',' << fmt(ay.to_y(curves[c].y[i]));
    }
    os << "\"/>\n";
    legend_entry(os, c, colour, curves[c].name);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace vda::cli
