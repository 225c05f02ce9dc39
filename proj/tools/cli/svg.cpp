#include "svg.hpp"

#include <cmath>
#include <cstdio>

namespace reebflow::cli {

namespace {

std::string num(double v) {
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
    else out += c;
  }
  return out;
}

}  // namespace

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width, int height)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), width_(width), height_(height) {}

double SvgCanvas::px(double x) const { return (x - x_min_) / (x_max_ - x_min_) * width_; }
double SvgCanvas::py(double y) const { return (y_max_ - y) / (y_max_ - y_min_) * height_; }

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width,
                         bool dashed, bool arrow) {
  std::string p;
  for (const auto& [x, y] : pts) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (!p.empty()) p += ' ';
    p += num(px(x)) + "," + num(py(y));
  }
  if (p.empty()) return;
  body_ += "  <polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"";
  if (dashed) body_ += " stroke-dasharray=\"6,4\"";
  if (arrow) body_ += " marker-end=\"url(#arrow)\"";
  body_ += " points=\"" + p + "\"/>\n";
}

void SvgCanvas::circle(double x, double y, double r_px, const std::string& fill) {
  body_ += "  <circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r_px) + "\" fill=\"" + fill +
           "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, int size) {
  body_ += "  <text x=\"" + num(px(x)) + "\" y=\"" + num(py(y)) + "\" font-family=\"serif\" font-size=\"" +
           std::to_string(size) + "\">" + escape(s) + "</text>\n";
}

std::string SvgCanvas::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
         std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
         "\">\n"
         "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"black\"/></marker></defs>\n"
         "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

}  // namespace reebflow::cli
