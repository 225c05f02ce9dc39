#pragma once

#include <string>
#include <utility>
#include <vector>

namespace reebflow::cli {

/// Minimal static SVG canvas over a world rectangle; y points up.
class SvgCanvas {
 public:
  SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width = 800, int height = 600);

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.0,
                bool dashed = false, bool arrow = false);
  void circle(double x, double y, double r_px, const std::string& fill);
  void text(double x, double y, const std::string& s, int size = 14);
  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  int width_, height_;
  std::string body_;
};

}  // namespace reebflow::cli
