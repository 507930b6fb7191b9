#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/unipoly.hpp"

namespace cplens {

struct RootSet {
  std::vector<Cx> values;        // all complex roots, with multiplicity
  std::vector<bool> converged;   // per-root convergence flag
  int iterations = 0;

  bool all_converged() const {
    for (bool c : converged)
      if (!c) return false;
    return true;
  }
};

namespace detail {

// Horner value, derivative, and Adams-style running error bound at z.
struct HornerEval {
  Cx p, dp;
  double err_bound;
};

inline HornerEval horner_full(const std::vector<Cx>& c, Cx z) {
  const double az = std::abs(z);
  Cx p = c.back(), dp{0.0};
  double e = std::abs(c.back());
  for (int k = int(c.size()) - 2; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + c[std::size_t(k)];
    e = e * az + std::abs(p);
  }
  return {p, dp, e};
}

}  // namespace detail

/// All complex roots of p by simultaneous Aberth-Ehrlich iteration.
///
/// Initial guesses sit on the circle of the Cauchy coefficient bound,
/// perturbed in angle and radius to break symmetry; the run is deterministic
/// for a given polynomial. A root counts as converged when its correction
/// drops below 1e-13 of the root bound or its polynomial value falls to the
/// rounding floor of the Horner evaluation (which is where multiple roots
/// settle). After max_iter sweeps the best iterates are returned with their
/// convergence flags; `tol` only enters the caller-facing residual contract
/// |p(root)| <= tol * sum_k |c_k||root|^k checked by callers and tests.
inline RootSet find_roots(const UniPoly& poly, double tol = 1e-10, int max_iter = 200) {
  (void)tol;
  RootSet out;
  if (poly.degree() < 1) return out;

  // Scale to unit leading coefficient for the iteration.
  std::vector<Cx> c = poly.coeffs();
  const Cx lead = c.back();
  for (Cx& v : c) v /= lead;
  const std::size_t n = c.size() - 1;

  double cauchy = 0.0;
  for (std::size_t k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(c[k]));
  const double radius = 1.0 + cauchy;

  out.values.resize(n);
  out.converged.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double theta = 2.0 * std::numbers::pi * (double(i) + 0.371) / double(n);
    double r = radius * (1.0 + 0.05 * (std::fmod(double(i) * 0.6180339887, 1.0) - 0.5));
    out.values[i] = Cx{r * std::cos(theta), r * std::sin(theta)};
  }
  if (n == 1) {
    out.values[0] = -c[0];
    out.converged[0] = true;
    out.iterations = 1;
    return out;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const double correction_floor = 1e-13 * radius;

  for (int sweep = 0; sweep < max_iter; ++sweep) {
    out.iterations = sweep + 1;
    bool all_done = true;
    for (std::size_t i = 0; i < n; ++i) {
      Cx z = out.values[i];
      auto [p, dp, bound] = detail::horner_full(c, z);
      if (std::abs(p) <= 4.0 * eps * bound) {
        out.converged[i] = true;
        continue;
      }
      Cx newton;
      if (std::abs(dp) > 0.0) {
        newton = p / dp;
      } else {
        // flat spot: nudge off it deterministically
        newton = Cx{0.1 * (1.0 + std::abs(z)), 0.05 * (1.0 + std::abs(z))};
      }
      Cx repulsion{0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        Cx d = z - out.values[j];
        if (std::abs(d) > 0.0) repulsion += Cx{1.0} / d;
      }
      Cx denom = Cx{1.0} - newton * repulsion;
      Cx w = std::abs(denom) > 1e-300 ? newton / denom : newton;
      out.values[i] = z - w;
      if (std::abs(w) <= correction_floor) {
        out.converged[i] = true;
      } else {
        out.converged[i] = false;
        all_done = false;
      }
    }
    if (all_done) break;
  }
  return out;
}

}  // namespace cplens
