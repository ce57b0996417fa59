#include "powershare/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "powershare/csv.hpp"

namespace powershare {

namespace {

constexpr double kW = 640, kH = 440;
constexpr double kLeft = 64, kRight = 20, kTop = 36, kBottom = 48;

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << (std::fabs(v) < 1e-12 ? 0.0 : v);
  return s.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& color,
                       double width) {
  series_.push_back({x, y, color, width, 1.0, false});
}

void SvgPlot::add_points(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& color, double radius,
                         double opacity) {
  series_.push_back({x, y, color, radius, opacity, true});
}

void SvgPlot::add_region(double x0, double x1, const std::string& color,
                         double opacity) {
  regions_.push_back({x0, x1, opacity, color});
}

void SvgPlot::add_hline(double y, const std::string& color) {
  hlines_.emplace_back(y, color);
}

std::string SvgPlot::render() const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  for (const auto& [y, c] : hlines_) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kW - kLeft - kRight);
  };
  auto py = [&](double y) {
    return kH - kBottom - (y - ymin) / (ymax - ymin) * (kH - kTop - kBottom);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& r : regions_) {
    const double a = px(std::clamp(r.x0, xmin, xmax));
    const double b = px(std::clamp(r.x1, xmin, xmax));
    if (b <= a) continue;
    out << "<rect x=\"" << a << "\" y=\"" << kTop << "\" width=\"" << b - a
        << "\" height=\"" << kH - kTop - kBottom << "\" fill=\"" << r.color
        << "\" opacity=\"" << r.opacity << "\"/>\n";
  }

  // axes and ticks
  const double xstep = nice_step(xmax - xmin);
  const double ystep = nice_step(ymax - ymin);
  out << "<g stroke=\"#444\" stroke-width=\"1\" font-size=\"11\" "
         "font-family=\"sans-serif\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
      << kW - kRight << "\" y2=\"" << kH - kBottom << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kH - kBottom << "\"/>\n";
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12;
       t += xstep) {
    out << "<line x1=\"" << px(t) << "\" y1=\"" << kH - kBottom << "\" x2=\""
        << px(t) << "\" y2=\"" << kH - kBottom + 4 << "\"/>\n";
    out << "<text x=\"" << px(t) << "\" y=\"" << kH - kBottom + 16
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">"
        << fmt(t) << "</text>\n";
  }
  for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-12;
       t += ystep) {
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(t) << "\" x2=\""
        << kLeft << "\" y2=\"" << py(t) << "\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" << fmt(t)
        << "</text>\n";
  }
  out << "</g>\n";

  for (const auto& [y, color] : hlines_)
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\""
        << kW - kRight << "\" y2=\"" << py(y) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"4 3\"/>\n";

  for (const auto& s : series_) {
    if (s.is_points) {
      out << "<g fill=\"" << s.color << "\" opacity=\"" << s.opacity
          << "\">\n";
      for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"" << s.width_or_radius << "\"/>\n";
      out << "</g>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"" << s.width_or_radius << "\" points=\"";
      for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        out << px(s.x[i]) << "," << py(s.y[i]) << " ";
      out << "\"/>\n";
    }
  }

  out << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-size=\"14\" font-family=\"sans-serif\">" << title_
      << "</text>\n";
  out << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\">"
      << x_label_ << "</text>\n";
  out << "<text x=\"16\" y=\"" << (kTop + kH - kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 16 "
      << (kTop + kH - kBottom) / 2 << ")\">" << y_label_ << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  out << render();
}

}  // namespace powershare
