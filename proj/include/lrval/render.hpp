#pragma once
// Diagram rendering.  Row j of the diagram holds, left to right from the
// origin line: the base part mu_j, then the parts k_{1j}, ..., k_{jj}.
// Negative extents (negative base parts or negative edge parts) are drawn to
// the left of their anchor as shaded, thinner boxes.  ASCII output rounds
// lengths only visually (one cell per scale unit); labels stay exact.  SVG
// output carries the exact rationals in data-exact attributes alongside the
// numeric geometry.

#include <sstream>
#include <string>
#include <vector>

#include "filling.hpp"

namespace lrval {

struct DiagramSpec {
  LRFilling filling;
  bool origin_line = true;
  bool labels = true;
  int scale = 1;  // cells (ASCII) or 20*scale pixels (SVG) per length-1
};

namespace detail {

struct Block {
  int row = 0;        // 1-based diagram row
  int strip = 0;      // 0 for the base partition, i for strip i
  Rat from, to;       // signed horizontal extent, from <= to
  bool negative = false;
};

inline std::vector<Block> layout(const LRFilling& F) {
  std::vector<Block> blocks;
  const int r = F.r();
  for (int j = 1; j <= r; ++j) {
    Rat cur(0);
    // base part mu_j
    const Rat m = F.mu[j - 1];
    if (m >= 0)
      blocks.push_back({j, 0, Rat(0), m, false});
    else
      blocks.push_back({j, 0, m, Rat(0), true});
    cur = m;
    for (int i = 1; i <= j; ++i) {
      const Rat k = F.part(i, j);
      if (k >= 0) {
        blocks.push_back({j, i, cur, cur + k, false});
        cur += k;
      } else {
        blocks.push_back({j, i, cur + k, cur, true});
        cur += k;
      }
    }
  }
  return blocks;
}

inline long cells(const Rat& x, int scale) {
  // visual rounding to the nearest cell
  Rat v = x * scale;
  return rat_floor(v + Rat(1, 2)).get_num().get_si();
}

}  // namespace detail

inline std::string render_ascii(const DiagramSpec& spec) {
  const LRFilling& F = spec.filling;
  const int r = F.r();
  const auto blocks = detail::layout(F);

  Rat lo(0), hi(0);
  for (const auto& b : blocks) {
    if (b.from < lo) lo = b.from;
    if (b.to > hi) hi = b.to;
  }
  const long c_lo = detail::cells(lo, spec.scale);
  const long c_hi = detail::cells(hi, spec.scale);
  const long width = c_hi - c_lo + 1;

  std::ostringstream os;
  for (int j = 1; j <= r; ++j) {
    std::string line(static_cast<size_t>(width) + 1, ' ');
    for (const auto& b : blocks) {
      if (b.row != j) continue;
      const long a = detail::cells(b.from, spec.scale) - c_lo;
      const long z = detail::cells(b.to, spec.scale) - c_lo;
      const char fill = b.negative ? '.' : (b.strip == 0 ? '=' : static_cast<char>(
                                                                     '0' + (b.strip % 10)));
      for (long c = a; c < z; ++c) line[static_cast<size_t>(c)] = fill;
    }
    if (spec.origin_line) {
      const long origin = -c_lo;
      if (origin >= 0 && origin <= width) {
        std::string marked;
        marked.append(line.substr(0, static_cast<size_t>(origin)));
        marked += '|';
        marked.append(line.substr(static_cast<size_t>(origin)));
        line = marked;
      }
    }
    // trim trailing spaces
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
    if (spec.labels) {
      os << "  row " << j << ": mu=" << rat_str(F.mu[j - 1]);
      for (int i = 1; i <= j; ++i)
        os << " k" << i << j << "=" << rat_str(F.part(i, j));
      os << "\n";
    }
  }
  return os.str();
}

namespace detail {

inline std::string svg_num(const Rat& x) {
  // decimal with enough digits for the half-grid values that occur in
  // practice; the exact value always rides along in data-exact
  const double d = x.get_d();
  std::ostringstream os;
  os.precision(6);
  os << d;
  return os.str();
}

}  // namespace detail

inline std::string render_svg(const DiagramSpec& spec) {
  const LRFilling& F = spec.filling;
  const int r = F.r();
  const auto blocks = detail::layout(F);
  const int unit = 20 * spec.scale;
  const int row_h = unit;

  Rat lo(0), hi(0);
  for (const auto& b : blocks) {
    if (b.from < lo) lo = b.from;
    if (b.to > hi) hi = b.to;
  }
  const Rat width = (hi - lo + 2) * unit;
  const int height = (r + 1) * row_h;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << detail::svg_num(width) << "\" height=\"" << height << "\">\n";
  const Rat x0 = (Rat(1) - lo) * unit;  // x pixel offset of the origin
  if (spec.origin_line) {
    os << "  <line x1=\"" << detail::svg_num(x0) << "\" y1=\"0\" x2=\""
       << detail::svg_num(x0) << "\" y2=\"" << height
       << "\" stroke=\"black\" stroke-dasharray=\"4 2\"/>\n";
  }
  for (const auto& b : blocks) {
    if (b.from == b.to) continue;
    const Rat x = x0 + b.from * unit;
    const Rat w = (b.to - b.from) * unit;
    const int y = (b.row - 1) * row_h + row_h / 2;
    const int h = b.negative ? row_h / 3 : (2 * row_h) / 3;  // negative: thinner
    const char* fillcolor = b.negative ? "#999999" : (b.strip == 0 ? "#dddddd" : "#ffffff");
    os << "  <rect x=\"" << detail::svg_num(x) << "\" y=\"" << y << "\" width=\""
       << detail::svg_num(w) << "\" height=\"" << h << "\" fill=\"" << fillcolor
       << "\" stroke=\"black\" data-row=\"" << b.row << "\" data-strip=\"" << b.strip
       << "\" data-exact-from=\"" << rat_str(b.from) << "\" data-exact-to=\""
       << rat_str(b.to) << "\"";
    if (b.negative) os << " data-negative=\"1\"";
    os << "/>\n";
    if (spec.labels && b.strip > 0) {
      os << "  <text x=\"" << detail::svg_num(x + w / 2) << "\" y=\"" << (y + h - 4)
         << "\" font-size=\"10\" text-anchor=\"middle\">k" << b.strip << b.row << "="
         << rat_str(b.to - b.from == 0 ? Rat(0)
                                       : (b.negative ? b.from - b.to : b.to - b.from))
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lrval
