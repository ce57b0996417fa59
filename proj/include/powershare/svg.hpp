#pragma once

// Minimal standalone-SVG line/scatter plots. Figures are a convenience on
// top of the CSV outputs, never an input to any numeric check.

#include <string>
#include <vector>

namespace powershare {

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, double width = 1.5);
  void add_points(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double radius = 2.0,
                  double opacity = 0.5);
  // Shaded x-interval spanning the full plot height.
  void add_region(double x0, double x1, const std::string& color,
                  double opacity = 0.15);
  void add_hline(double y, const std::string& color);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string color;
    double width_or_radius;
    double opacity;
    bool is_points;
  };
  struct Region {
    double x0, x1, opacity;
    std::string color;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Region> regions_;
  std::vector<std::pair<double, std::string>> hlines_;
};

}  // namespace powershare
