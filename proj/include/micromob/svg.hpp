#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace micromob::svg {

/// Replaces &, <, > for use inside text nodes and attribute values.
std::string escape_text(std::string_view text);

/// Tiny deterministic SVG assembler: elements appear in call order and all
/// numbers use shortest round-trip formatting, so identical drawing code
/// yields identical bytes.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double width, double height,
            const std::string& fill, const std::string& stroke = "",
            double stroke_width = 1.0);
  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double stroke_width = 1.0,
            const std::string& dash = "");
  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& stroke, double stroke_width = 1.0);
  void circle(double cx, double cy, double r, const std::string& fill);
  /// `anchor` is an SVG text-anchor: start, middle, or end.
  void text(double x, double y, std::string_view content, double size,
            const std::string& anchor = "start",
            const std::string& fill = "#333333");

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

}  // namespace micromob::svg
