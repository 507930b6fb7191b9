#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cplens/caustics.hpp"
#include "cplens/complex.hpp"
#include "cplens/lefschetz.hpp"

namespace cplens {

/// All machine-readable output goes through this: 10 significant digits,
/// enough to carry anything above solver tolerance, byte-stable across runs.
inline std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// One JSON object per fixed point, then one summary object, one per line.
inline void write_image_records(const InvariantReport& report, std::ostream& out) {
  for (const auto& [fp, mu] : report.points) {
    out << "{\"z1_re\":" << fmt10(fp.z1.real()) << ",\"z1_im\":" << fmt10(fp.z1.imag())
        << ",\"z2_re\":" << fmt10(fp.z2.real()) << ",\"z2_im\":" << fmt10(fp.z2.imag())
        << ",\"is_real\":" << (fp.is_real ? "true" : "false")
        << ",\"mu_re\":" << fmt10(mu.real()) << ",\"mu_im\":" << fmt10(mu.imag())
        << ",\"residual\":" << fmt10(fp.residual)
        << ",\"degenerate\":" << (fp.degenerate ? "true" : "false") << "}\n";
  }
  out << "{\"model\":\"" << detail::json_escape(report.model_name) << "\""
      << ",\"zeta_re\":" << fmt10(report.source.real())
      << ",\"zeta_im\":" << fmt10(report.source.imag())
      << ",\"n_fixed\":" << report.points.size() << ",\"n_real\":" << report.n_real()
      << ",\"complex_sum_re\":" << fmt10(report.complex_sum.real())
      << ",\"complex_sum_im\":" << fmt10(report.complex_sum.imag())
      << ",\"real_sum\":" << fmt10(report.real_sum)
      << ",\"valid\":" << (report.valid ? "true" : "false") << "}\n";
}

inline void write_invariant_csv_header(std::ostream& out) {
  out << "zeta_re,zeta_im,n_fixed,n_real,sum_re,sum_im,real_sum,valid\n";
}

inline void write_invariant_csv_row(const InvariantReport& report, std::ostream& out) {
  out << fmt10(report.source.real()) << ',' << fmt10(report.source.imag()) << ','
      << report.points.size() << ',' << report.n_real() << ','
      << fmt10(report.complex_sum.real()) << ',' << fmt10(report.complex_sum.imag()) << ','
      << fmt10(report.real_sum) << ',' << (report.valid ? 1 : 0) << '\n';
}

/// Scan counts as CSV, row-major from the bottom-left node; -1 marks nodes
/// masked by a pole, a caustic, or a failed solve.
inline void write_grid_csv(const MultiplicityGrid& grid, std::ostream& out) {
  out << "y1,y2,count\n";
  for (int j = 0; j < grid.window.ny; ++j)
    for (int i = 0; i < grid.window.nx; ++i) {
      const Cx y = grid.window.node(i, j);
      out << fmt10(y.real()) << ',' << fmt10(y.imag()) << ','
          << grid.counts[std::size_t(j) * grid.window.nx + i] << '\n';
    }
}

/// Polylines as CSV with a stable id per polyline. `kind` tags which plane
/// the curve lives in (critical or caustic).
inline void write_polyline_csv_header(std::ostream& out) { out << "kind,polyline_id,re,im\n"; }

inline void write_polyline_csv(const std::string& kind, const std::vector<Polyline>& lines,
                               std::ostream& out, int first_id = 0) {
  for (std::size_t p = 0; p < lines.size(); ++p)
    for (Cx z : lines[p])
      out << kind << ',' << (first_id + int(p)) << ',' << fmt10(z.real()) << ','
          << fmt10(z.imag()) << '\n';
}

namespace detail {

struct SvgFrame {
  double x0, y0, scale;  // world -> pixel: px = (x - x0)*scale, py = (y0 - y)*scale
  double width, height;
};

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void svg_polylines(const SvgFrame& f, const std::vector<Polyline>& lines,
                          const char* stroke, std::ostream& out) {
  for (const Polyline& line : lines) {
    if (line.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (k) out << ' ';
      out << px((line[k].real() - f.x0) * f.scale) << ',' << px((f.y0 - line[k].imag()) * f.scale);
    }
    out << "\"/>\n";
  }
}

}  // namespace detail

/// Multiplicity scan as a standalone SVG: one grayscale cell per node
/// (darker = more images, red = masked), caustics overlaid, legend naming
/// every count present.
inline void write_scan_svg(const MultiplicityGrid& grid, std::ostream& out) {
  const Window& w = grid.window;
  const double world_w = 2.0 * w.half_width + w.cell_dx();
  const double world_h = 2.0 * w.half_height + w.cell_dy();
  const double scale = 760.0 / std::max(world_w, world_h);
  detail::SvgFrame f{w.center.real() - w.half_width - 0.5 * w.cell_dx(),
                     w.center.imag() + w.half_height + 0.5 * w.cell_dy(), scale,
                     world_w * scale + 40.0, world_h * scale + 70.0};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::px(f.width)
      << "\" height=\"" << detail::px(f.height) << "\">\n";
  out << "<g transform=\"translate(20,50)\">\n";

  const double cw = w.cell_dx() * scale;
  const double ch = w.cell_dy() * scale;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const int c = grid.counts[std::size_t(j) * w.nx + i];
      std::string fill;
      if (c < 0) {
        fill = "#cc3333";
      } else {
        const int shade =
            255 - int(std::lround(205.0 * double(c) / double(std::max(1, grid.max_count))));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", shade, shade, shade);
        fill = buf;
      }
      const Cx node = w.node(i, j);
      out << "<rect x=\"" << detail::px((node.real() - 0.5 * w.cell_dx() - f.x0) * scale)
          << "\" y=\"" << detail::px((f.y0 - node.imag() - 0.5 * w.cell_dy()) * scale)
          << "\" width=\"" << detail::px(cw) << "\" height=\"" << detail::px(ch) << "\" fill=\""
          << fill << "\"/>\n";
    }
  detail::svg_polylines(f, grid.caustic_polylines, "#2255cc", out);
  out << "</g>\n";
  out << "<text x=\"20\" y=\"30\" font-family=\"monospace\" font-size=\"16\">max count = "
      << grid.max_count << " (white = 0, dark = " << grid.max_count
      << ", red = masked, blue = caustics)</text>\n";
  out << "</svg>\n";
}

/// Critical curves and caustics on one canvas (the planes share coordinates
/// in these units): critical in gray, caustics in blue.
inline void write_curves_svg(const std::vector<Polyline>& critical,
                             const std::vector<Polyline>& caustic, std::ostream& out) {
  double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
  bool first = true;
  for (const auto* set : {&critical, &caustic})
    for (const Polyline& line : *set)
      for (Cx z : line) {
        if (first) {
          lo_x = hi_x = z.real();
          lo_y = hi_y = z.imag();
          first = false;
        }
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
      }
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-6;
  lo_x -= pad, hi_x += pad, lo_y -= pad, hi_y += pad;
  const double scale = 760.0 / std::max(hi_x - lo_x, hi_y - lo_y);
  detail::SvgFrame f{lo_x, hi_y, scale, (hi_x - lo_x) * scale + 40.0,
                     (hi_y - lo_y) * scale + 70.0};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::px(f.width)
      << "\" height=\"" << detail::px(f.height) << "\">\n";
  out << "<g transform=\"translate(20,50)\">\n";
  detail::svg_polylines(f, critical, "#888888", out);
  detail::svg_polylines(f, caustic, "#2255cc", out);
  out << "</g>\n";
  out << "<text x=\"20\" y=\"30\" font-family=\"monospace\" font-size=\"16\">critical curves"
         " (gray) and caustics (blue)</text>\n";
  out << "</svg>\n";
}

}  // namespace cplens
