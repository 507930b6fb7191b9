#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/lens_map.hpp"
#include "cplens/model.hpp"
#include "cplens/caustics.hpp"

namespace cplens {

/// Images of one source found by an independent method, for cross-checking
/// the algebraic solver. Multistart search is a lower bound: it can miss
/// images, never invent them.
struct OracleResult {
  std::vector<Cx> images;
  std::vector<double> mus;
  Cx source{0.0};
  std::string method;
};

namespace detail {

/// Fixed jitter seed so oracle runs are reproducible everywhere. The raw
/// mt19937 stream is bit-stable across platforms; library distributions are
/// not, so uniforms are built from the top 27 bits directly.
inline constexpr std::uint32_t kOracleSeed = 91227u;

inline double unit_double(std::mt19937& rng) {
  return double(rng() >> 5) * 0x1.0p-27;
}

}  // namespace detail

/// Finds real images of `zeta` by damped 2D Newton iteration on the real
/// lens-map residual, started from a jittered grid over `win`. Starts that
/// diverge, hit a pole, or stall are discarded. Images are deduplicated,
/// sorted, and reported with their signed magnifications.
inline OracleResult multistart_newton_real(const DeflectionModel& m, Cx zeta,
                                           const Window& win = {Cx{0.0}, 5.0, 5.0, 8, 8},
                                           int n_starts = 256) {
  win.check();
  if (n_starts < 64) throw Error("multistart_newton_real: need at least 64 starts");

  std::mt19937 rng(detail::kOracleSeed);
  const int per_axis = int(std::ceil(std::sqrt(double(n_starts))));

  std::vector<Cx> found;
  std::vector<double> residuals;

  for (int gj = 0; gj < per_axis; ++gj) {
    for (int gi = 0; gi < per_axis; ++gi) {
      // Jittered grid start: cell corner plus up to one full cell of offset,
      // so starts never line up with model symmetry axes.
      const double u = (double(gi) + detail::unit_double(rng)) / double(per_axis);
      const double v = (double(gj) + detail::unit_double(rng)) / double(per_axis);
      Cx x = win.center + Cx{(2.0 * u - 1.0) * win.half_width,
                             (2.0 * v - 1.0) * win.half_height};

      bool ok = false;
      double res = 0.0;
      for (int it = 0; it < 80; ++it) {
        Cx f;
        try {
          f = lens_map_real(m, x) - zeta;
        } catch (const PoleEvaluation&) {
          break;
        }
        res = std::abs(f);
        if (res < 1e-12 * (1.0 + std::abs(x))) {
          ok = true;
          break;
        }
        // Central-difference Jacobian of the real lens map: keeps the oracle
        // independent of the analytic derivative path it is meant to check.
        const double h = 1e-7 * (1.0 + std::abs(x));
        Cx fx1p, fx1m, fx2p, fx2m;
        try {
          fx1p = lens_map_real(m, x + Cx{h, 0.0});
          fx1m = lens_map_real(m, x - Cx{h, 0.0});
          fx2p = lens_map_real(m, x + Cx{0.0, h});
          fx2m = lens_map_real(m, x - Cx{0.0, h});
        } catch (const PoleEvaluation&) {
          break;
        }
        const double a = (fx1p.real() - fx1m.real()) / (2.0 * h);
        const double c = (fx1p.imag() - fx1m.imag()) / (2.0 * h);
        const double b = (fx2p.real() - fx2m.real()) / (2.0 * h);
        const double d = (fx2p.imag() - fx2m.imag()) / (2.0 * h);
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-14 * (1.0 + std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d)))
          break;
        Cx step{-(d * f.real() - b * f.imag()) / det, -(-c * f.real() + a * f.imag()) / det};
        // Cap the step so a near-singular Jacobian cannot fling the iterate
        // across the plane.
        const double cap = 0.5 * (1.0 + std::abs(x));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        x += step;
        if (std::abs(x - win.center) > 4.0 * (win.half_width + win.half_height)) break;
      }
      if (!ok) continue;
      try {
        if (std::abs(lens_map_real(m, x) - zeta) >= 1e-9 * (1.0 + std::abs(x))) continue;
      } catch (const PoleEvaluation&) {
        continue;
      }

      bool duplicate = false;
      for (std::size_t k = 0; k < found.size(); ++k) {
        if (std::abs(found[k] - x) < 1e-6 * (1.0 + std::abs(x))) {
          if (res < residuals[k]) {
            found[k] = x;
            residuals[k] = res;
          }
          duplicate = true;
          break;
        }
      }
      if (!duplicate) {
        found.push_back(x);
        residuals.push_back(res);
      }
    }
  }

  std::sort(found.begin(), found.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  OracleResult out;
  out.source = zeta;
  out.method = "multistart-newton";
  for (Cx z : found) {
    out.images.push_back(z);
    out.mus.push_back(1.0 / det_real_jacobian(m, z));
  }
  return out;
}

/// Exact images and magnifications for the uniform-sheet filament. Sources
/// with y1^2 <= 8*sigma0 sit inside (or on) the caustic strip and have no
/// images; outside it there are exactly two, and their magnifications sum
/// to 1 identically.
inline OracleResult filament_closed_form(double sigma0, Cx zeta) {
  if (!(sigma0 > 0.0)) throw NonpositiveParameter("filament_closed_form: sigma0 must be positive");
  OracleResult out;
  out.source = zeta;
  out.method = "filament-closed-form";
  const double y1 = zeta.real();
  const double disc = y1 * y1 - 8.0 * sigma0;
  if (disc <= 0.0) return out;
  const double root = std::sqrt(disc);
  for (double x1 : {(y1 - root) / 2.0, (y1 + root) / 2.0}) {
    out.images.emplace_back(x1, zeta.imag());
    out.mus.push_back(x1 * x1 / (x1 * x1 - 2.0 * sigma0));
  }
  return out;
}

/// Exact images and magnifications for a single point mass at the origin.
/// Both images lie on the line through the source; a centered source maps
/// to the full Einstein ring and has no discrete image set.
inline OracleResult point_mass_closed_form(double mass, Cx zeta) {
  if (!(mass > 0.0)) throw NonpositiveMass("point_mass_closed_form: mass must be positive");
  if (zeta == Cx{0.0}) throw CenteredSource("point_mass_closed_form: source at the lens center");
  OracleResult out;
  out.source = zeta;
  out.method = "point-closed-form";
  const double stretch = std::sqrt(1.0 + 4.0 * mass / std::norm(zeta));
  for (double sign : {-1.0, 1.0}) {
    const Cx z = zeta * (1.0 + sign * stretch) / 2.0;
    out.images.push_back(z);
    out.mus.push_back(1.0 / (1.0 - mass * mass / (std::norm(z) * std::norm(z))));
  }
  return out;
}

}  // namespace cplens
