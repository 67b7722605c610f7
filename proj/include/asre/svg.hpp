// Copyright 2026 The ASRE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRE_SVG_HPP_
#define ASRE_SVG_HPP_

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace asre {

// Hand-emitted SVG, enough for line charts and heatmaps. Coordinates are
// formatted with fixed precision so output is deterministic across runs.
class SvgWriter {
 public:
  SvgWriter(int width, int height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double stroke_width = 1.0) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
             "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                double stroke_width = 1.5) {
    body_ += "<polyline points=\"" + point_list(points) + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& points, const std::string& fill,
               double opacity = 1.0) {
    body_ += "<polygon points=\"" + point_list(points) + "\" fill=\"" + fill + "\" fill-opacity=\"" +
             fmt(opacity) + "\" stroke=\"none\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "start", int size = 12) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width_) + "\" height=\"" + std::to_string(height_) + "\" viewBox=\"0 0 " +
           std::to_string(width_) + " " + std::to_string(height_) + "\">\n<rect width=\"" +
           std::to_string(width_) + "\" height=\"" + std::to_string(height_) + "\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
  }

  static std::string point_list(const std::vector<std::pair<double, double>>& points) {
    std::string out;
    for (const auto& [x, y] : points) {
      if (!out.empty()) out += " ";
      out += fmt(x) + "," + fmt(y);
    }
    return out;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
      if (ch == '&') {
        out += "&amp;";
      } else if (ch == '<') {
        out += "&lt;";
      } else if (ch == '>') {
        out += "&gt;";
      } else {
        out += ch;
      }
    }
    return out;
  }

  int width_;
  int height_;
  std::string body_;
};

}  // namespace asre

#endif  // ASRE_SVG_HPP_
