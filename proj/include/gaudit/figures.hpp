#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gaudit::fig {

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
};

// A retained list of drawing primitives rendered to SVG markup and to a PNG
// raster from the same data, so the two mirrors of a figure always agree.
// Coordinates are pixels, origin top-left, y growing downward. No timestamps
// or environment-dependent state anywhere in the output.
class Figure {
 public:
  Figure(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  void rect(double x, double y, double w, double h, Color fill);
  void frame(double x, double y, double w, double h, Color stroke);
  void line(double x1, double y1, double x2, double y2, Color c,
            double stroke_width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, Color c,
                double stroke_width = 1.0);
  void circle(double cx, double cy, double r, Color fill);
  // anchor: 'l' start, 'm' middle, 'r' end. size is the glyph height in px.
  void text(double x, double y, const std::string& s, int size, Color c,
            char anchor = 'l');

  std::string to_svg() const;
  std::vector<std::uint8_t> to_png() const;

  // Writes <stem>.svg and <stem>.png; returns the two paths.
  std::vector<std::filesystem::path> write(const std::filesystem::path& stem) const;

 private:
  enum class Op { rect, frame, line, circle, text };
  struct Prim {
    Op op;
    double a = 0, b = 0, c = 0, d = 0;
    double stroke_width = 1.0;
    Color color;
    std::string str;
    int size = 0;
    char anchor = 'l';
  };
  int width_, height_;
  std::vector<Prim> prims_;
};

// Shared palette so every figure uses the same series colors.
Color series_color(std::size_t index);

}  // namespace gaudit::fig
