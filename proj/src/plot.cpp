#include "coincast/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coincast/csv.hpp"
#include "coincast/errors.hpp"

namespace coincast {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr double kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40,
                 kMarginBottom = 45;

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
};

Color parse_color(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') return Color{0, 0, 0};
  const auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return 0;
  };
  return Color{static_cast<std::uint8_t>(nib(hex[1]) * 16 + nib(hex[2])),
               static_cast<std::uint8_t>(nib(hex[3]) * 16 + nib(hex[4])),
               static_cast<std::uint8_t>(nib(hex[5]) * 16 + nib(hex[6]))};
}

// ---- draw list ----

struct Line {
  std::vector<std::pair<double, double>> points;
  std::string color;
  double width = 1.5;
};

struct FilledPoly {
  std::vector<std::pair<double, double>> points;
  std::string color;
};

struct Label {
  double x = 0, y = 0;  // baseline-left anchor in pixels
  std::string text;
  int size = 12;
  std::string color = "#000000";
};

struct DrawList {
  std::vector<FilledPoly> polys;
  std::vector<Line> lines;
  std::vector<Label> labels;
};

// ---- SVG backend ----

void render_svg(const std::string& path, const DrawList& dl) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write plot: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const auto& p : dl.polys) {
    out << "<polygon fill=\"" << p.color << "\" fill-opacity=\"0.35\" points=\"";
    for (const auto& [x, y] : p.points)
      out << format_double(x) << ',' << format_double(y) << ' ';
    out << "\"/>\n";
  }
  for (const auto& l : dl.lines) {
    out << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\""
        << format_double(l.width) << "\" points=\"";
    for (const auto& [x, y] : l.points)
      out << format_double(x) << ',' << format_double(y) << ' ';
    out << "\"/>\n";
  }
  for (const auto& t : dl.labels) {
    out << "<text x=\"" << format_double(t.x) << "\" y=\"" << format_double(t.y)
        << "\" font-family=\"sans-serif\" font-size=\"" << t.size << "\" fill=\""
        << t.color << "\">" << t.text << "</text>\n";
  }
  out << "</svg>\n";
}

// ---- PNG backend ----

class Raster {
 public:
  Raster() : pixels_(kWidth * kHeight * 3, 255) {}

  void set(int x, int y, Color c) {
    if (x < 0 || x >= kWidth || y < 0 || y >= kHeight) return;
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * kWidth + x);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  void blend(int x, int y, Color c, double alpha) {
    if (x < 0 || x >= kWidth || y < 0 || y >= kHeight) return;
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * kWidth + x);
    for (int k = 0; k < 3; ++k) {
      const double base = pixels_[i + k];
      const double col = k == 0 ? c.r : (k == 1 ? c.g : c.b);
      pixels_[i + k] = static_cast<std::uint8_t>(base + (col - base) * alpha);
    }
  }

  void line(double x0, double y0, double x1, double y1, Color c, double width) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len = std::max(1.0, std::hypot(dx, dy));
    const int steps = static_cast<int>(len * 2);
    const int half = width > 1.2 ? 1 : 0;
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const int px = static_cast<int>(std::lround(x0 + dx * t));
      const int py = static_cast<int>(std::lround(y0 + dy * t));
      for (int ox = -half; ox <= half; ++ox)
        for (int oy = -half; oy <= half; ++oy) set(px + ox, py + oy, c);
    }
  }

  // even-odd scanline fill, alpha-blended
  void fill_poly(const std::vector<std::pair<double, double>>& pts, Color c) {
    if (pts.size() < 3) return;
    double ymin = pts[0].second, ymax = pts[0].second;
    for (const auto& p : pts) {
      ymin = std::min(ymin, p.second);
      ymax = std::max(ymax, p.second);
    }
    for (int y = std::max(0, static_cast<int>(ymin));
         y <= std::min(kHeight - 1, static_cast<int>(ymax)); ++y) {
      std::vector<double> xs;
      const double yc = y + 0.5;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        if ((a.second <= yc && b.second > yc) || (b.second <= yc && a.second > yc))
          xs.push_back(a.first +
                       (yc - a.second) / (b.second - a.second) * (b.first - a.first));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
        for (int x = std::max(0, static_cast<int>(xs[i]));
             x <= std::min(kWidth - 1, static_cast<int>(xs[i + 1])); ++x)
          blend(x, y, c, 0.35);
    }
  }

  void glyph(int x, int y, const char* const rows[7], Color c, int scale) {
    for (int r = 0; r < 7; ++r)
      for (int col = 0; col < 5; ++col)
        if (rows[r][col] == '#')
          for (int sx = 0; sx < scale; ++sx)
            for (int sy = 0; sy < scale; ++sy)
              set(x + col * scale + sx, y + r * scale + sy, c);
  }

  void write(const std::string& path) const;

 private:
  std::vector<std::uint8_t> pixels_;
};

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

void png_chunk(std::ofstream& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> head;
  put_u32(head, static_cast<std::uint32_t>(data.size()));
  out.write(reinterpret_cast<const char*>(head.data()), 4);
  out.write(type, 4);
  if (!data.empty())
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!data.empty())
    crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
  std::vector<std::uint8_t> tail;
  put_u32(tail, crc);
  out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

void Raster::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write plot: " + path);
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.write(reinterpret_cast<const char*>(sig), 8);

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, kWidth);
  put_u32(ihdr, kHeight);
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  png_chunk(out, "IHDR", ihdr);

  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(kHeight) * (kWidth * 3 + 1));
  for (int y = 0; y < kHeight; ++y) {
    raw.push_back(0);  // filter: none
    const std::size_t off = 3 * static_cast<std::size_t>(y) * kWidth;
    raw.insert(raw.end(), pixels_.begin() + static_cast<std::ptrdiff_t>(off),
               pixels_.begin() + static_cast<std::ptrdiff_t>(off + 3 * kWidth));
  }
  uLongf out_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> idat(out_len);
  if (compress2(idat.data(), &out_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw DataError("png compression failed for " + path);
  idat.resize(out_len);
  png_chunk(out, "IDAT", idat);
  png_chunk(out, "IEND", {});
}

// 5x7 bitmap font; text in the PNG backend is lowercased and unsupported
// glyphs render as spaces.
const char* const* find_glyph(char c) {
#define G(name, r0, r1, r2, r3, r4, r5, r6) \
  static const char* const name[7] = {r0, r1, r2, r3, r4, r5, r6};
  G(g0, ".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###.")
  G(g1, "..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###.")
  G(g2, ".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####")
  G(g3, ".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###.")
  G(g4, "...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#.")
  G(g5, "#####", "#....", "####.", "....#", "....#", "#...#", ".###.")
  G(g6, ".###.", "#....", "#....", "####.", "#...#", "#...#", ".###.")
  G(g7, "#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#...")
  G(g8, ".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###.")
  G(g9, ".###.", "#...#", "#...#", ".####", "....#", "....#", ".###.")
  G(ga, ".....", ".....", ".###.", "....#", ".####", "#...#", ".####")
  G(gb, "#....", "#....", "####.", "#...#", "#...#", "#...#", "####.")
  G(gc, ".....", ".....", ".###.", "#....", "#....", "#...#", ".###.")
  G(gd, "....#", "....#", ".####", "#...#", "#...#", "#...#", ".####")
  G(ge, ".....", ".....", ".###.", "#...#", "#####", "#....", ".###.")
  G(gf, "..##.", ".#...", "###..", ".#...", ".#...", ".#...", ".#...")
  G(gg, ".....", ".####", "#...#", "#...#", ".####", "....#", ".###.")
  G(gh, "#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#")
  G(gi, "..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###.")
  G(gj, "...#.", ".....", "...#.", "...#.", "...#.", "#..#.", ".##..")
  G(gk, "#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#.")
  G(gl, ".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###.")
  G(gm, ".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#...#")
  G(gn, ".....", ".....", "####.", "#...#", "#...#", "#...#", "#...#")
  G(go, ".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###.")
  G(gp, ".....", "####.", "#...#", "#...#", "####.", "#....", "#....")
  G(gq, ".....", ".####", "#...#", "#...#", ".####", "....#", "....#")
  G(gr, ".....", ".....", "#.##.", "##...", "#....", "#....", "#....")
  G(gs, ".....", ".....", ".####", "#....", ".###.", "....#", "####.")
  G(gt, ".#...", ".#...", "###..", ".#...", ".#...", ".#..#", "..##.")
  G(gu, ".....", ".....", "#...#", "#...#", "#...#", "#...#", ".####")
  G(gv, ".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#..")
  G(gw, ".....", ".....", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#.")
  G(gx, ".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#")
  G(gy, ".....", "#...#", "#...#", ".####", "....#", "#...#", ".###.")
  G(gz, ".....", ".....", "#####", "...#.", "..#..", ".#...", "#####")
  G(gdot, ".....", ".....", ".....", ".....", ".....", ".##..", ".##..")
  G(gdash, ".....", ".....", ".....", ".###.", ".....", ".....", ".....")
  G(gplus, ".....", "..#..", "..#..", "#####", "..#..", "..#..", ".....")
  G(geq, ".....", ".....", "#####", ".....", "#####", ".....", ".....")
  G(gcomma, ".....", ".....", ".....", ".....", ".##..", "..#..", ".#...")
  G(gcolon, ".....", ".##..", ".##..", ".....", ".##..", ".##..", ".....")
  G(gslash, "....#", "...#.", "..#..", ".#...", "#....", ".....", ".....")
#undef G
  switch (c) {
    case '0': return g0;
    case '1': return g1;
    case '2': return g2;
    case '3': return g3;
    case '4': return g4;
    case '5': return g5;
    case '6': return g6;
    case '7': return g7;
    case '8': return g8;
    case '9': return g9;
    case 'a': return ga;
    case 'b': return gb;
    case 'c': return gc;
    case 'd': return gd;
    case 'e': return ge;
    case 'f': return gf;
    case 'g': return gg;
    case 'h': return gh;
    case 'i': return gi;
    case 'j': return gj;
    case 'k': return gk;
    case 'l': return gl;
    case 'm': return gm;
    case 'n': return gn;
    case 'o': return go;
    case 'p': return gp;
    case 'q': return gq;
    case 'r': return gr;
    case 's': return gs;
    case 't': return gt;
    case 'u': return gu;
    case 'v': return gv;
    case 'w': return gw;
    case 'x': return gx;
    case 'y': return gy;
    case 'z': return gz;
    case '.': return gdot;
    case '-': return gdash;
    case '+': return gplus;
    case '=': return geq;
    case ',': return gcomma;
    case ':': return gcolon;
    case '/': return gslash;
    default: return nullptr;
  }
}

void render_png(const std::string& path, const DrawList& dl) {
  Raster raster;
  for (const auto& p : dl.polys) raster.fill_poly(p.points, parse_color(p.color));
  for (const auto& l : dl.lines) {
    const Color c = parse_color(l.color);
    for (std::size_t i = 0; i + 1 < l.points.size(); ++i)
      raster.line(l.points[i].first, l.points[i].second, l.points[i + 1].first,
                  l.points[i + 1].second, c, l.width);
  }
  for (const auto& t : dl.labels) {
    const Color c = parse_color(t.color);
    const int scale = t.size >= 15 ? 2 : 1;
    int x = static_cast<int>(t.x);
    const int y = static_cast<int>(t.y) - 7 * scale;  // labels anchor at baseline
    for (char raw : t.text) {
      const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
      if (const char* const* glyph = find_glyph(lc))
        raster.glyph(x, y, glyph, c, scale);
      x += 6 * scale;
    }
  }
  raster.write(path);
}

// ---- chart assembly ----

struct AxisScale {
  double min = 0, max = 1;

  double to_px_x(double v) const {
    return kMarginLeft + (v - min) / (max - min) * (kWidth - kMarginLeft - kMarginRight);
  }
};

struct Scale2d {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

  double px(double x) const {
    return kMarginLeft +
           (x - xmin) / (xmax - xmin) * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom -
           (y - ymin) / (ymax - ymin) * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void add_frame(DrawList& dl, const Scale2d& s, const std::string& title) {
  Line frame;
  frame.color = "#333333";
  frame.width = 1.0;
  frame.points = {{kMarginLeft, kMarginTop},
                  {kMarginLeft, kHeight - kMarginBottom},
                  {kWidth - kMarginRight, kHeight - kMarginBottom}};
  dl.lines.push_back(frame);
  dl.labels.push_back(Label{kMarginLeft, kMarginTop - 12, title, 16});

  for (int i = 0; i <= 5; ++i) {
    const double xv = s.xmin + (s.xmax - s.xmin) * i / 5.0;
    const double yv = s.ymin + (s.ymax - s.ymin) * i / 5.0;
    const double xp = s.px(xv);
    const double yp = s.py(yv);
    dl.lines.push_back(Line{{{xp, kHeight - kMarginBottom},
                             {xp, kHeight - kMarginBottom + 4}},
                            "#333333",
                            1.0});
    dl.lines.push_back(Line{{{kMarginLeft - 4, yp}, {kMarginLeft, yp}}, "#333333", 1.0});
    dl.labels.push_back(Label{xp - 12, kHeight - kMarginBottom + 18, tick_text(xv), 11});
    dl.labels.push_back(Label{6, yp + 4, tick_text(yv), 11});
  }
}

void expand(double& lo, double& hi) {
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
}

void render_both(const std::string& base, const DrawList& dl) {
  render_svg(base + ".svg", dl);
  render_png(base + ".png", dl);
}

}  // namespace

void write_line_chart(const std::string& base, const std::string& title,
                      const std::vector<PlotSeries>& series, const PlotBand* band) {
  if (series.empty()) throw DataError("write_line_chart: no series");
  Scale2d s;
  bool first = true;
  auto widen = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (first) {
        s.xmin = s.xmax = xs[i];
        s.ymin = s.ymax = ys[i];
        first = false;
      }
      s.xmin = std::min(s.xmin, xs[i]);
      s.xmax = std::max(s.xmax, xs[i]);
      s.ymin = std::min(s.ymin, ys[i]);
      s.ymax = std::max(s.ymax, ys[i]);
    }
  };
  for (const auto& sr : series) {
    if (sr.x.size() != sr.y.size())
      throw DataError("write_line_chart: series '" + sr.name + "' x/y size mismatch");
    widen(sr.x, sr.y);
  }
  if (band) {
    widen(band->x, band->lo);
    widen(band->x, band->hi);
  }
  if (first) throw DataError("write_line_chart: all series empty");
  expand(s.xmin, s.xmax);
  expand(s.ymin, s.ymax);

  DrawList dl;
  if (band) {
    FilledPoly poly;
    poly.color = band->color;
    for (std::size_t i = 0; i < band->x.size(); ++i)
      poly.points.emplace_back(s.px(band->x[i]), s.py(band->hi[i]));
    for (std::size_t i = band->x.size(); i-- > 0;)
      poly.points.emplace_back(s.px(band->x[i]), s.py(band->lo[i]));
    dl.polys.push_back(std::move(poly));
  }
  add_frame(dl, s, title);
  double legend_y = kMarginTop + 16;
  for (const auto& sr : series) {
    Line line;
    line.color = sr.color;
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      line.points.emplace_back(s.px(sr.x[i]), s.py(sr.y[i]));
    dl.lines.push_back(std::move(line));

    dl.lines.push_back(Line{{{kWidth - 170.0, legend_y - 4},
                             {kWidth - 150.0, legend_y - 4}},
                            sr.color,
                            2.5});
    dl.labels.push_back(Label{kWidth - 145.0, legend_y, sr.name, 12, sr.color});
    legend_y += 16;
  }
  render_both(base, dl);
}

void write_histogram(const std::string& base, const std::string& title,
                     const std::vector<double>& bin_edges,
                     const std::vector<std::size_t>& counts) {
  if (bin_edges.size() != counts.size() + 1 || counts.empty())
    throw DataError("write_histogram: inconsistent bins");
  Scale2d s;
  s.xmin = bin_edges.front();
  s.xmax = bin_edges.back();
  s.ymin = 0;
  s.ymax = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  if (s.ymax == 0) s.ymax = 1;
  expand(s.xmin, s.xmax);
  s.ymax *= 1.05;

  DrawList dl;
  add_frame(dl, s, title);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    FilledPoly bar;
    bar.color = "#1f77b4";
    const double x0 = s.px(bin_edges[b]) + 1;
    const double x1 = s.px(bin_edges[b + 1]) - 1;
    const double y0 = s.py(0);
    const double y1 = s.py(static_cast<double>(counts[b]));
    bar.points = {{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}};
    dl.polys.push_back(std::move(bar));
  }
  render_both(base, dl);
}

std::pair<std::vector<double>, std::vector<double>> gaussian_density_grid(
    double mu, double sigma2, int n_points) {
  if (!(sigma2 >= 0)) throw DataError("gaussian_density_grid: negative variance");
  // display-only floor so a consensus (zero-variance) day still renders
  const double sigma =
      std::max(std::sqrt(sigma2), 1e-6 * std::max(1.0, std::abs(mu)));
  std::vector<double> xs(static_cast<std::size_t>(n_points)),
      ys(static_cast<std::size_t>(n_points));
  const double lo = mu - 6 * sigma, hi = mu + 6 * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  for (int i = 0; i < n_points; ++i) {
    const double x = lo + (hi - lo) * i / (n_points - 1);
    const double z = (x - mu) / sigma;
    xs[static_cast<std::size_t>(i)] = x;
    ys[static_cast<std::size_t>(i)] = norm * std::exp(-0.5 * z * z);
  }
  return {xs, ys};
}

void write_density_plot(const std::string& base, const std::string& title,
                        double mu, double sigma2) {
  const auto [xs, ys] = gaussian_density_grid(mu, sigma2, 401);
  PlotSeries curve;
  curve.name = "density";
  curve.color = "#2ca02c";
  curve.x = xs;
  curve.y = ys;

  Scale2d s;
  s.xmin = xs.front();
  s.xmax = xs.back();
  s.ymin = 0;
  s.ymax = *std::max_element(ys.begin(), ys.end()) * 1.1;
  expand(s.xmin, s.xmax);

  DrawList dl;
  add_frame(dl, s, title);
  Line line;
  line.color = curve.color;
  for (std::size_t i = 0; i < xs.size(); ++i)
    line.points.emplace_back(s.px(xs[i]), s.py(ys[i]));
  dl.lines.push_back(std::move(line));
  // vertical marker at the mean
  dl.lines.push_back(Line{{{s.px(mu), s.py(s.ymin)}, {s.px(mu), kMarginTop + 10.0}},
                          "#d62728",
                          1.0});
  dl.labels.push_back(Label{kMarginLeft + 10, kMarginTop + 20,
                            "mu = " + tick_text(mu) +
                                ", sigma = " + tick_text(std::sqrt(sigma2)),
                            12, "#d62728"});
  render_both(base, dl);
}

}  // namespace coincast
