#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <thread>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/lens_map.hpp"
#include "cplens/model.hpp"
#include "cplens/solver.hpp"

namespace cplens {

using Polyline = std::vector<Cx>;

/// Axis-aligned evaluation grid of nx-by-ny nodes. Used both in the lens
/// plane (critical curves) and the source plane (multiplicity scans).
struct Window {
  Cx center{0.0};
  double half_width = 1.0;
  double half_height = 1.0;
  int nx = 64;
  int ny = 64;

  void check() const {
    if (!(half_width > 0.0) || !(half_height > 0.0))
      throw Error("Window: extents must be positive");
    if (nx < 8 || ny < 8) throw Error("Window: need at least 8 nodes per axis");
  }

  Cx node(int i, int j) const {
    return center + Cx{-half_width + 2.0 * half_width * double(i) / double(nx - 1),
                       -half_height + 2.0 * half_height * double(j) / double(ny - 1)};
  }

  double cell_dx() const { return 2.0 * half_width / double(nx - 1); }
  double cell_dy() const { return 2.0 * half_height / double(ny - 1); }
};

struct MultiplicityGrid {
  Window window;                 // source plane
  std::vector<int> counts;       // row-major, counts[j*nx + i]; -1 = masked
  int max_count = 0;
  std::vector<Polyline> caustic_polylines;   // source plane
  std::vector<Polyline> critical_polylines;  // lens plane
};

namespace detail {

// Pole-proximity margin below which a grid node is masked instead of
// evaluated.
inline constexpr double kGridPoleMargin = 1e-6;

// Edge keys give every interpolated contour vertex a grid-global identity:
// the crossing on the bottom edge of cell (i, j) is the same vertex as the
// crossing on the top edge of cell (i, j-1), which is what lets segments
// stitch into polylines exactly, with no coordinate-tolerance matching.
inline std::int64_t h_edge(int i, int j, int nx) { return 2 * (std::int64_t(j) * nx + i); }
inline std::int64_t v_edge(int i, int j, int nx) { return 2 * (std::int64_t(j) * nx + i) + 1; }

struct SegmentSoup {
  std::map<std::int64_t, Cx> points;                      // edge key -> position
  std::vector<std::array<std::int64_t, 2>> segments;      // pairs of edge keys
};

/// Chains soup segments into polylines: open chains first (started from
/// degree-1 vertices in key order), then closed loops. Deterministic for a
/// given soup.
inline std::vector<Polyline> stitch(const SegmentSoup& soup) {
  std::multimap<std::int64_t, std::size_t> at_vertex;
  for (std::size_t s = 0; s < soup.segments.size(); ++s) {
    at_vertex.insert({soup.segments[s][0], s});
    at_vertex.insert({soup.segments[s][1], s});
  }
  std::vector<bool> used(soup.segments.size(), false);
  std::vector<Polyline> out;

  auto walk = [&](std::size_t start_seg, std::int64_t start_key) {
    Polyline line;
    line.push_back(soup.points.at(start_key));
    std::size_t seg = start_seg;
    std::int64_t key = start_key;
    while (true) {
      used[seg] = true;
      key = soup.segments[seg][0] == key ? soup.segments[seg][1] : soup.segments[seg][0];
      line.push_back(soup.points.at(key));
      std::size_t next = soup.segments.size();
      auto [lo, hi] = at_vertex.equal_range(key);
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second]) {
          next = it->second;
          break;
        }
      if (next == soup.segments.size()) break;
      seg = next;
    }
    out.push_back(std::move(line));
  };

  // Open chains: vertices touched by exactly one segment.
  for (auto it = at_vertex.begin(); it != at_vertex.end(); ++it) {
    if (at_vertex.count(it->first) != 1 || used[it->second]) continue;
    walk(it->second, it->first);
  }
  // Remaining segments belong to closed loops.
  for (std::size_t s = 0; s < soup.segments.size(); ++s)
    if (!used[s]) walk(s, soup.segments[s][0]);
  return out;
}

}  // namespace detail

/// Zero contours of the lens-map Jacobian determinant over the window:
/// the critical curves. Nodes on deflection poles are masked and cells
/// touching them skipped; linear interpolation along cell edges; the two
/// ambiguous marching-squares cases are split by the sign at the cell
/// center.
inline std::vector<Polyline> critical_curves(const DeflectionModel& m, const Window& win) {
  win.check();
  std::vector<double> det(std::size_t(win.nx) * std::size_t(win.ny), 0.0);
  std::vector<bool> ok(det.size(), false);
  bool any = false;
  for (int j = 0; j < win.ny; ++j)
    for (int i = 0; i < win.nx; ++i) {
      const Cx z = win.node(i, j);
      const Cx zb = std::conj(z);
      if (m.alpha1.den_margin(z, zb) < detail::kGridPoleMargin ||
          m.alpha2.den_margin(z, zb) < detail::kGridPoleMargin)
        continue;
      det[std::size_t(j) * win.nx + i] = det_real_jacobian(m, z);
      ok[std::size_t(j) * win.nx + i] = true;
      any = true;
    }
  if (!any) throw EmptyWindow("critical_curves: every node sits on a pole");

  detail::SegmentSoup soup;
  auto value = [&](int i, int j) { return det[std::size_t(j) * win.nx + i]; };
  auto valid = [&](int i, int j) { return ok[std::size_t(j) * win.nx + i]; };

  for (int j = 0; j + 1 < win.ny; ++j) {
    for (int i = 0; i + 1 < win.nx; ++i) {
      if (!valid(i, j) || !valid(i + 1, j) || !valid(i + 1, j + 1) || !valid(i, j + 1)) continue;
      const double d00 = value(i, j), d10 = value(i + 1, j);
      const double d11 = value(i + 1, j + 1), d01 = value(i, j + 1);
      const int code = (d00 < 0.0 ? 1 : 0) | (d10 < 0.0 ? 2 : 0) | (d11 < 0.0 ? 4 : 0) |
                       (d01 < 0.0 ? 8 : 0);
      if (code == 0 || code == 15) continue;

      auto cross = [&](double a, double b) { return a / (a - b); };
      auto bottom = [&] {
        soup.points[detail::h_edge(i, j, win.nx)] =
            win.node(i, j) + Cx{cross(d00, d10) * win.cell_dx(), 0.0};
        return detail::h_edge(i, j, win.nx);
      };
      auto top = [&] {
        soup.points[detail::h_edge(i, j + 1, win.nx)] =
            win.node(i, j + 1) + Cx{cross(d01, d11) * win.cell_dx(), 0.0};
        return detail::h_edge(i, j + 1, win.nx);
      };
      auto left = [&] {
        soup.points[detail::v_edge(i, j, win.nx)] =
            win.node(i, j) + Cx{0.0, cross(d00, d01) * win.cell_dy()};
        return detail::v_edge(i, j, win.nx);
      };
      auto right = [&] {
        soup.points[detail::v_edge(i + 1, j, win.nx)] =
            win.node(i + 1, j) + Cx{0.0, cross(d10, d11) * win.cell_dy()};
        return detail::v_edge(i + 1, j, win.nx);
      };
      auto add = [&](std::int64_t a, std::int64_t b) { soup.segments.push_back({a, b}); };

      switch (code) {
        case 1: case 14: add(left(), bottom()); break;
        case 2: case 13: add(bottom(), right()); break;
        case 3: case 12: add(left(), right()); break;
        case 4: case 11: add(top(), right()); break;
        case 6: case 9:  add(bottom(), top()); break;
        case 7: case 8:  add(left(), top()); break;
        case 5: case 10: {
          // Saddle: resolve by the sign at the cell center.
          const Cx zc = win.node(i, j) + Cx{0.5 * win.cell_dx(), 0.5 * win.cell_dy()};
          double dc = 0.0;
          bool center_ok = m.alpha1.den_margin(zc, std::conj(zc)) >= detail::kGridPoleMargin &&
                           m.alpha2.den_margin(zc, std::conj(zc)) >= detail::kGridPoleMargin;
          if (center_ok) dc = det_real_jacobian(m, zc);
          const bool center_neg = center_ok && dc < 0.0;
          const bool diag_neg = code == 5;  // negative corners on the 00-11 diagonal
          // When the center sign matches the diagonal corners they connect
          // through the middle and the two arcs cut off the other corners;
          // otherwise the arcs hug the diagonal corners themselves.
          if (center_neg == diag_neg) {
            add(left(), top());
            add(bottom(), right());
          } else {
            add(left(), bottom());
            add(top(), right());
          }
          break;
        }
        default: break;
      }
    }
  }
  return detail::stitch(soup);
}

/// Image of critical polylines under the lens map: the caustics. Vertices on
/// poles are dropped; `dropped` (when given) receives how many.
inline std::vector<Polyline> map_to_caustics(const DeflectionModel& m,
                                             const std::vector<Polyline>& critical,
                                             int* dropped = nullptr) {
  std::vector<Polyline> out;
  int lost = 0;
  for (const Polyline& line : critical) {
    Polyline mapped;
    for (Cx z : line) {
      try {
        mapped.push_back(lens_map_real(m, z));
      } catch (const PoleEvaluation&) {
        ++lost;
      }
    }
    if (!mapped.empty()) out.push_back(std::move(mapped));
  }
  if (dropped) *dropped = lost;
  return out;
}

namespace detail {

/// Lens-plane window large enough to hold the critical set for any of the
/// built-in models, derived from the source window so caustics mapped from
/// it stay in view.
inline Window derive_lens_window(const DeflectionModel& m, const Window& src) {
  Cx center{0.0};
  if (!m.params.positions.empty()) {
    for (Cx c : m.params.positions) center += c;
    center /= double(m.params.positions.size());
  }
  const double reach = std::max(src.half_width, src.half_height) + std::abs(src.center) +
                       std::abs(center);
  const double half = std::max(3.0, 1.5 * reach);
  return {center, half, half, 201, 201};
}

}  // namespace detail

/// Real-image counts over a source-plane window, with the critical curves
/// and caustics attached. Nodes where the solve fails or reports a
/// degenerate (on-caustic) point are masked with -1. Node evaluations are
/// independent; `jobs` threads split them by index, and the result is
/// identical for any thread count.
inline MultiplicityGrid multiplicity_scan(const DeflectionModel& m, const Window& src,
                                          const SolveOptions& opts = {}, int jobs = 1) {
  src.check();
  if (jobs < 1) throw Error("multiplicity_scan: jobs must be at least 1");

  MultiplicityGrid grid;
  grid.window = src;
  grid.counts.assign(std::size_t(src.nx) * std::size_t(src.ny), -1);

  auto eval_node = [&](std::size_t idx) {
    const int i = int(idx % std::size_t(src.nx));
    const int j = int(idx / std::size_t(src.nx));
    try {
      int n = 0;
      bool degenerate = false;
      for (const FixedPoint& fp : solve_fixed_points(m, src.node(i, j), opts)) {
        if (fp.degenerate || fp.multiplicity > 1) degenerate = true;
        if (fp.is_real) ++n;
      }
      grid.counts[idx] = degenerate ? -1 : n;
    } catch (const Error&) {
      grid.counts[idx] = -1;
    }
  };

  const std::size_t total = grid.counts.size();
  if (jobs == 1) {
    for (std::size_t idx = 0; idx < total; ++idx) eval_node(idx);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t idx = std::size_t(w); idx < total; idx += std::size_t(jobs))
          eval_node(idx);
      });
    for (std::thread& t : workers) t.join();
  }

  grid.max_count = 0;
  for (int c : grid.counts) grid.max_count = std::max(grid.max_count, c);

  grid.critical_polylines = critical_curves(m, detail::derive_lens_window(m, src));
  grid.caustic_polylines = map_to_caustics(m, grid.critical_polylines);
  return grid;
}

}  // namespace cplens
