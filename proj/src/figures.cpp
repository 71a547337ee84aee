#include "gaudit/figures.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "gaudit/errors.hpp"

namespace gaudit::fig {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  // "-0.00" and "0.00" must render identically or SVG bytes drift
  if (std::strcmp(buf, "-0.00") == 0) return "0.00";
  return buf;
}

std::string color_hex(Color c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// 5x7 bitmap font, one byte per row, low 5 bits used, bit 4 = left column.
struct Glyph {
  char ch;
  std::uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {' ', {0, 0, 0, 0, 0, 0, 0}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0E}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'*', {0x00, 0x0A, 0x04, 0x1F, 0x04, 0x0A, 0x00}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
    {'\'', {0x0C, 0x04, 0x08, 0x00, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'<', {0x02, 0x04, 0x08, 0x10, 0x08, 0x04, 0x02}},
    {'>', {0x08, 0x04, 0x02, 0x01, 0x02, 0x04, 0x08}},
    {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
};

const std::uint8_t* glyph_rows(char ch) {
  if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
  for (const auto& g : kFont)
    if (g.ch == ch) return g.rows;
  return nullptr;
}

class Raster {
 public:
  Raster(int w, int h) : w_(w), h_(h), rgb_(static_cast<size_t>(w) * h * 3, 255) {}

  void set(int x, int y, Color c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const size_t off = (static_cast<size_t>(y) * w_ + x) * 3;
    rgb_[off] = c.r;
    rgb_[off + 1] = c.g;
    rgb_[off + 2] = c.b;
  }

  void fill_rect(double x, double y, double w, double h, Color c) {
    const int x0 = static_cast<int>(std::lround(x));
    const int y0 = static_cast<int>(std::lround(y));
    const int x1 = static_cast<int>(std::lround(x + w));
    const int y1 = static_cast<int>(std::lround(y + h));
    for (int yy = y0; yy < y1; ++yy)
      for (int xx = x0; xx < x1; ++xx) set(xx, yy, c);
  }

  void draw_line(double x1, double y1, double x2, double y2, Color c, double sw) {
    const double dx = x2 - x1, dy = y2 - y1;
    const double len = std::hypot(dx, dy);
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    const int half = std::max(0, static_cast<int>(std::lround(sw / 2.0)) -
                                     (static_cast<int>(std::lround(sw)) % 2 == 0 ? 1 : 0));
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const int px = static_cast<int>(std::lround(x1 + t * dx));
      const int py = static_cast<int>(std::lround(y1 + t * dy));
      for (int oy = -half; oy <= half; ++oy)
        for (int ox = -half; ox <= half; ++ox) set(px + ox, py + oy, c);
    }
  }

  void fill_circle(double cx, double cy, double r, Color c) {
    const int x0 = static_cast<int>(std::floor(cx - r)), x1 = static_cast<int>(std::ceil(cx + r));
    const int y0 = static_cast<int>(std::floor(cy - r)), y1 = static_cast<int>(std::ceil(cy + r));
    for (int yy = y0; yy <= y1; ++yy)
      for (int xx = x0; xx <= x1; ++xx) {
        const double ddx = xx + 0.5 - cx, ddy = yy + 0.5 - cy;
        if (ddx * ddx + ddy * ddy <= r * r) set(xx, yy, c);
      }
  }

  void draw_text(double x, double y, const std::string& s, int size, Color c,
                 char anchor) {
    const int scale = std::max(1, size / 8);
    const int advance = 6 * scale;
    const int text_w = static_cast<int>(s.size()) * advance - scale;
    int px = static_cast<int>(std::lround(x));
    // y is the text baseline, glyphs are 7 rows tall
    int py = static_cast<int>(std::lround(y)) - 7 * scale;
    if (anchor == 'm') px -= text_w / 2;
    else if (anchor == 'r') px -= text_w;
    for (char ch : s) {
      const std::uint8_t* rows = glyph_rows(ch);
      if (rows) {
        for (int r = 0; r < 7; ++r)
          for (int col = 0; col < 5; ++col)
            if (rows[r] & (1 << (4 - col)))
              for (int sy = 0; sy < scale; ++sy)
                for (int sx = 0; sx < scale; ++sx)
                  set(px + col * scale + sx, py + r * scale + sy, c);
      }
      px += advance;
    }
  }

  const std::vector<std::uint8_t>& rgb() const { return rgb_; }
  int w() const { return w_; }
  int h() const { return h_; }

 private:
  int w_, h_;
  std::vector<std::uint8_t> rgb_;
};

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[5],
               const std::vector<std::uint8_t>& payload) {
  put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), payload.begin(), payload.end());
  out.insert(out.end(), body.begin(), body.end());
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0L, body.data(), static_cast<uInt>(body.size())));
  put_u32_be(out, crc);
}

std::vector<std::uint8_t> png_encode(const Raster& raster) {
  const int w = raster.w(), h = raster.h();
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<size_t>(h) * (1 + static_cast<size_t>(w) * 3));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    const auto* row = raster.rgb().data() + static_cast<size_t>(y) * w * 3;
    raw.insert(raw.end(), row, row + static_cast<size_t>(w) * 3);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 9) !=
      Z_OK)
    throw StorageError("figures: png deflate failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(w));
  put_u32_be(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", comp);
  put_chunk(out, "IEND", {});
  return out;
}

}  // namespace

Figure::Figure(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw ConfigError("figures: non-positive canvas size");
}

void Figure::rect(double x, double y, double w, double h, Color fill) {
  prims_.push_back({Op::rect, x, y, w, h, 1.0, fill, "", 0, 'l'});
}

void Figure::frame(double x, double y, double w, double h, Color stroke) {
  prims_.push_back({Op::frame, x, y, w, h, 1.0, stroke, "", 0, 'l'});
}

void Figure::line(double x1, double y1, double x2, double y2, Color c,
                  double stroke_width) {
  prims_.push_back({Op::line, x1, y1, x2, y2, stroke_width, c, "", 0, 'l'});
}

void Figure::polyline(const std::vector<std::pair<double, double>>& pts, Color c,
                      double stroke_width) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    line(pts[i - 1].first, pts[i - 1].second, pts[i].first, pts[i].second, c,
         stroke_width);
}

void Figure::circle(double cx, double cy, double r, Color fill) {
  prims_.push_back({Op::circle, cx, cy, r, 0, 1.0, fill, "", 0, 'l'});
}

void Figure::text(double x, double y, const std::string& s, int size, Color c,
                  char anchor) {
  prims_.push_back({Op::text, x, y, 0, 0, 1.0, c, s, size, anchor});
}

std::string Figure::to_svg() const {
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
         "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
         std::to_string(height_) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) +
         "\" height=\"" + std::to_string(height_) + "\" fill=\"#ffffff\"/>\n";
  for (const auto& p : prims_) {
    switch (p.op) {
      case Op::rect:
        svg += "<rect x=\"" + fmt2(p.a) + "\" y=\"" + fmt2(p.b) + "\" width=\"" +
               fmt2(p.c) + "\" height=\"" + fmt2(p.d) + "\" fill=\"" +
               color_hex(p.color) + "\"/>\n";
        break;
      case Op::frame:
        svg += "<rect x=\"" + fmt2(p.a) + "\" y=\"" + fmt2(p.b) + "\" width=\"" +
               fmt2(p.c) + "\" height=\"" + fmt2(p.d) + "\" fill=\"none\" stroke=\"" +
               color_hex(p.color) + "\"/>\n";
        break;
      case Op::line:
        svg += "<line x1=\"" + fmt2(p.a) + "\" y1=\"" + fmt2(p.b) + "\" x2=\"" +
               fmt2(p.c) + "\" y2=\"" + fmt2(p.d) + "\" stroke=\"" +
               color_hex(p.color) + "\" stroke-width=\"" + fmt2(p.stroke_width) +
               "\"/>\n";
        break;
      case Op::circle:
        svg += "<circle cx=\"" + fmt2(p.a) + "\" cy=\"" + fmt2(p.b) + "\" r=\"" +
               fmt2(p.c) + "\" fill=\"" + color_hex(p.color) + "\"/>\n";
        break;
      case Op::text: {
        const char* anchor = p.anchor == 'm' ? "middle" : p.anchor == 'r' ? "end" : "start";
        svg += "<text x=\"" + fmt2(p.a) + "\" y=\"" + fmt2(p.b) +
               "\" font-family=\"monospace\" font-size=\"" + std::to_string(p.size) +
               "\" fill=\"" + color_hex(p.color) + "\" text-anchor=\"" + anchor +
               "\">" + xml_escape(p.str) + "</text>\n";
        break;
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::uint8_t> Figure::to_png() const {
  Raster raster(width_, height_);
  for (const auto& p : prims_) {
    switch (p.op) {
      case Op::rect:
        raster.fill_rect(p.a, p.b, p.c, p.d, p.color);
        break;
      case Op::frame:
        raster.draw_line(p.a, p.b, p.a + p.c, p.b, p.color, 1.0);
        raster.draw_line(p.a, p.b + p.d, p.a + p.c, p.b + p.d, p.color, 1.0);
        raster.draw_line(p.a, p.b, p.a, p.b + p.d, p.color, 1.0);
        raster.draw_line(p.a + p.c, p.b, p.a + p.c, p.b + p.d, p.color, 1.0);
        break;
      case Op::line:
        raster.draw_line(p.a, p.b, p.c, p.d, p.color, p.stroke_width);
        break;
      case Op::circle:
        raster.fill_circle(p.a, p.b, p.c, p.color);
        break;
      case Op::text:
        raster.draw_text(p.a, p.b, p.str, p.size, p.color, p.anchor);
        break;
    }
  }
  return png_encode(raster);
}

std::vector<std::filesystem::path> Figure::write(
    const std::filesystem::path& stem) const {
  std::filesystem::create_directories(stem.parent_path());
  const auto svg_path = std::filesystem::path(stem).replace_extension(".svg");
  const auto png_path = std::filesystem::path(stem).replace_extension(".png");
  {
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw StorageError("figures: cannot write " + svg_path.string());
    out << to_svg();
  }
  {
    const auto png = to_png();
    std::ofstream out(png_path, std::ios::binary);
    if (!out) throw StorageError("figures: cannot write " + png_path.string());
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
  }
  return {svg_path, png_path};
}

Color series_color(std::size_t index) {
  static const Color palette[] = {
      {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
      {148, 103, 189}, {140, 86, 75},  {227, 119, 194}, {127, 127, 127},
      {188, 189, 34},  {23, 190, 207},
  };
  return palette[index % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace gaudit::fig
