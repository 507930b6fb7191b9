#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/lens_map.hpp"
#include "cplens/model.hpp"
#include "cplens/newton2d.hpp"
#include "cplens/resultant.hpp"
#include "cplens/roots.hpp"

namespace cplens {

/// One solution of the fixed-point system. `is_real` marks physical images
/// (z2 is the conjugate of z1); the rest are spurious companions that still
/// enter complex invariant sums. `transversal_det` is the determinant of the
/// deflection Jacobian matrix at the point; a value below the caustic floor
/// flags the point as degenerate (source on or near a caustic).
struct FixedPoint {
  Cx z1, z2;
  double residual = 0.0;
  bool is_real = false;
  bool converged = false;
  Cx transversal_det{0.0};
  bool degenerate = false;
  int multiplicity = 1;
};

struct SolveOptions {
  double residual_tol = 1e-10;
  double realness_tol = 1e-8;
  double dedup_tol = 1e-8;
  double caustic_det_floor = 1e-9;
  int max_newton_iter = 50;
};

/// Denominator-cleared fixed-point pair for source position zeta:
///   P1 = (z1 - zeta) V1 - U1,  P2 = (z2 - conj zeta) V2 - U2.
/// Common zeros away from the poles of the deflection are exactly the
/// complex fixed points of the source-plus-deflection map.
inline std::pair<BiPoly, BiPoly> fixed_point_system(const DeflectionModel& m, Cx zeta) {
  require_finite(zeta, "fixed_point_system");
  const BiPoly lin1 = BiPoly::var_z1() - BiPoly::constant(zeta);
  const BiPoly lin2 = BiPoly::var_z2() - BiPoly::constant(std::conj(zeta));
  return {lin1 * m.alpha1.den - m.alpha1.num, lin2 * m.alpha2.den - m.alpha2.num};
}

namespace detail {

// Pole tolerance for discarding candidates that sit on a denominator zero:
// such points satisfy the cleared system only because both cleared sides
// vanish, not because the deflection map has a fixed point there.
inline constexpr double kSolverPoleMargin = 1e-8;

// A polished candidate plus how far the polish moved it from its seed
// (relative to the coordinate scale). Small travel means the seed already
// sat in the root's own cluster; large travel means a stray elimination
// artifact was captured by a genuine root's Newton basin.
struct Scored {
  FixedPoint fp;
  double travel = 0.0;
};

// Seeds within this relative distance of their polished root count as
// genuine instances when two of them land on the same point; wanderers from
// farther away merge silently instead of raising the multiplicity.
inline constexpr double kClusterTravel = 1e-4;

}  // namespace detail

/// All complex fixed points for the given source. Eliminates z2 by resultant,
/// finds the roots of the eliminant, back-substitutes, polishes every
/// candidate on the original pair, and filters by residual and pole margin.
/// Output is sorted by (re z1, im z1, re z2, im z2) so identical inputs give
/// identical output regardless of scheduling.
inline std::vector<FixedPoint> solve_fixed_points(const DeflectionModel& m, Cx zeta,
                                                  const SolveOptions& opts = {}) {
  if (opts.residual_tol <= 0.0 || opts.realness_tol <= 0.0 || opts.dedup_tol <= 0.0 ||
      opts.caustic_det_floor <= 0.0 || opts.max_newton_iter <= 0)
    throw Error("solve_fixed_points: options must be positive");

  auto [p1, p2] = fixed_point_system(m, zeta);
  if (p1.is_zero() || p2.is_zero())
    throw DegenerateElimination("solve_fixed_points: a cleared equation vanished identically");

  // Polish a raw candidate on the full pair; empty result when it fails the
  // residual or pole filters.
  auto try_candidate = [&](Cx z1, Cx z2) -> std::vector<detail::Scored> {
    Newton2dResult pol = polish_2d(p1, p2, z1, z2, 1e-15, opts.max_newton_iter);
    if (!is_finite(pol.z1) || !is_finite(pol.z2)) return {};
    if (pol.residual > opts.residual_tol) return {};
    if (m.alpha1.den_margin(pol.z1, pol.z2) < detail::kSolverPoleMargin ||
        m.alpha2.den_margin(pol.z1, pol.z2) < detail::kSolverPoleMargin)
      return {};
    FixedPoint fp;
    fp.z1 = pol.z1;
    fp.z2 = pol.z2;
    fp.residual = pol.residual;
    fp.converged = true;
    fp.is_real = std::abs(fp.z2 - std::conj(fp.z1)) <= opts.realness_tol * (1.0 + std::abs(fp.z1));
    fp.transversal_det = complex_jacobian(m, fp.z1, fp.z2).det();
    fp.degenerate = std::abs(fp.transversal_det) < opts.caustic_det_floor;
    const double travel = std::max(std::abs(fp.z1 - z1) / (1.0 + std::abs(fp.z1)),
                                   std::abs(fp.z2 - z2) / (1.0 + std::abs(fp.z2)));
    return {{fp, travel}};
  };

  auto same_point = [&](const FixedPoint& a, const FixedPoint& b) {
    return std::max(std::abs(a.z1 - b.z1) / (1.0 + std::abs(b.z1)),
                    std::abs(a.z2 - b.z2) / (1.0 + std::abs(b.z2))) <= opts.dedup_tol;
  };

  // Survivors for one eliminant root. The first equation's slice drives the
  // back-substitution; the second is the fallback when the slice degenerates
  // (dropped degree at that z1, or every candidate filtered away). Within a
  // batch duplicates are collapsed without counting — a spurious slice root
  // polished onto a neighbor is a redundant branch, not a multiple root — so
  // each physical root enters once per eliminant root.
  auto survivors_at = [&](Cx r, bool r_is_z1) {
    std::vector<detail::Scored> batch;
    for (const BiPoly* eq : {&p1, &p2}) {
      const UniPoly slice = r_is_z1 ? eq->substitute_z1(r) : eq->substitute_z2(r);
      if (slice.degree() >= 1) {
        for (Cx w : find_roots(slice).values) {
          for (const detail::Scored& s : r_is_z1 ? try_candidate(r, w) : try_candidate(w, r)) {
            bool dup = false;
            for (detail::Scored& b : batch)
              if (same_point(s.fp, b.fp)) {
                if (s.fp.residual < b.fp.residual) b.fp = s.fp;
                b.travel = std::min(b.travel, s.travel);
                dup = true;
                break;
              }
            if (!dup) batch.push_back(s);
          }
        }
      }
      if (!batch.empty()) break;
    }
    return batch;
  };

  // Cross-batch merge. Two instances raise the multiplicity only when both
  // seeds were already in the root's cluster — that is the double-root
  // signature (the eliminant root list itself contains the coincidence).
  // A far-traveling capture is a stray elimination artifact and merges
  // silently.
  std::vector<detail::Scored> kept;
  auto merge_batch = [&](const std::vector<detail::Scored>& batch) {
    for (const detail::Scored& s : batch) {
      bool merged = false;
      for (detail::Scored& other : kept) {
        if (same_point(s.fp, other.fp)) {
          const bool genuine_pair =
              s.travel <= detail::kClusterTravel && other.travel <= detail::kClusterTravel;
          if (s.fp.residual < other.fp.residual) {
            const int mult = other.fp.multiplicity;
            other.fp = s.fp;
            other.fp.multiplicity = mult;
          }
          other.travel = std::min(other.travel, s.travel);
          if (genuine_pair) other.fp.multiplicity += 1;
          merged = true;
          break;
        }
      }
      if (!merged) kept.push_back(s);
    }
  };

  if (p1.degree2() < 1 || p2.degree2() < 1) {
    // Triangular shape: one equation is free of z2 and pins z1 directly.
    const BiPoly& flat = p1.degree2() < 1 ? p1 : p2;
    const BiPoly& other = p1.degree2() < 1 ? p2 : p1;
    if (flat.degree1() < 1)
      throw DegenerateElimination("solve_fixed_points: an equation is constant");
    if (other.degree2() < 1)
      throw DegenerateElimination("solve_fixed_points: neither equation constrains z2");
    for (Cx r : find_roots(flat.coeff_of_z2(0)).values)
      merge_batch(survivors_at(r, true));
  } else {
    UniPoly elim = resultant_z2(p1, p2);
    if (!elim.is_zero() && elim.degree() >= 1) {
      for (Cx r : find_roots(elim).values) merge_batch(survivors_at(r, true));
    } else if (elim.is_zero()) {
      // Structured degeneracy; retry once with the variables swapped.
      UniPoly elim1 = resultant_z1(p1, p2);
      if (elim1.is_zero() || elim1.degree() < 1)
        throw DegenerateElimination(
            "solve_fixed_points: elimination degenerate in both variable orders");
      for (Cx r : find_roots(elim1).values) merge_batch(survivors_at(r, false));
    }
    // A nonzero constant eliminant means no common zeros: fall through empty.
  }

  std::vector<FixedPoint> out;
  out.reserve(kept.size());
  for (const detail::Scored& s : kept) out.push_back(s.fp);
  std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) {
    if (a.z1.real() != b.z1.real()) return a.z1.real() < b.z1.real();
    if (a.z1.imag() != b.z1.imag()) return a.z1.imag() < b.z1.imag();
    if (a.z2.real() != b.z2.real()) return a.z2.real() < b.z2.real();
    return a.z2.imag() < b.z2.imag();
  });
  return out;
}

/// Number of physical (real) images of the source.
inline int count_real_images(const DeflectionModel& m, Cx zeta, const SolveOptions& opts = {}) {
  int n = 0;
  for (const FixedPoint& fp : solve_fixed_points(m, zeta, opts))
    if (fp.is_real) ++n;
  return n;
}

}  // namespace cplens
