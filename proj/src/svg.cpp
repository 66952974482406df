#include "micromob/svg.hpp"

#include "text_util.hpp"

namespace micromob::svg {

namespace {

std::string num(double v) { return detail::format_double(v); }

}  // namespace

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

Document::Document(double width, double height)
    : width_(width), height_(height) {}

void Document::rect(double x, double y, double width, double height,
                    const std::string& fill, const std::string& stroke,
                    double stroke_width) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
           num(width) + "\" height=\"" + num(height) + "\" fill=\"" +
           escape_text(fill) + "\"";
  if (!stroke.empty()) {
    body_ += " stroke=\"" + escape_text(stroke) + "\" stroke-width=\"" +
             num(stroke_width) + "\"";
  }
  body_ += "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2,
                    const std::string& stroke, double stroke_width,
                    const std::string& dash) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" +
           escape_text(stroke) + "\" stroke-width=\"" + num(stroke_width) +
           "\"";
  if (!dash.empty()) {
    body_ += " stroke-dasharray=\"" + escape_text(dash) + "\"";
  }
  body_ += "/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        const std::string& stroke, double stroke_width) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) body_ += ' ';
    body_ += num(points[i].first) + "," + num(points[i].second);
  }
  body_ += "\" fill=\"none\" stroke=\"" + escape_text(stroke) +
           "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void Document::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(r) + "\" fill=\"" + escape_text(fill) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size,
                    const std::string& anchor, const std::string& fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           num(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + escape_text(anchor) +
           "\" fill=\"" + escape_text(fill) + "\">" + escape_text(content) +
           "</text>\n";
}

std::string Document::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
         "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) +
         " " + num(height_) + "\">\n" + body_ + "</svg>\n";
}

}  // namespace micromob::svg
