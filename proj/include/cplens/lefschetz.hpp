#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/lens_map.hpp"
#include "cplens/model.hpp"
#include "cplens/solver.hpp"

namespace cplens {

/// Everything the invariant sums produce for one source position. `valid`
/// is false when any fixed point is degenerate, merged (multiplicity > 1),
/// or unconverged — the sums are still reported but carry no guarantee
/// there, since the closed sum-rule assumes simple transversal points.
struct InvariantReport {
  Cx source{0.0};
  std::string model_name;
  std::vector<std::pair<FixedPoint, Cx>> points;  // (fixed point, mu)
  Cx complex_sum{0.0};
  double real_sum = 0.0;
  std::vector<std::pair<int, Cx>> moments;  // (k, sum mu z1^k)
  bool valid = false;

  int n_real() const {
    int n = 0;
    for (const auto& [fp, mu] : points)
      if (fp.is_real) ++n;
    return n;
  }
};

/// Signed complex magnification of one fixed point: the reciprocal of the
/// transversality determinant. Real for physical images (up to rounding),
/// where its sign is the image parity.
inline Cx magnification(const FixedPoint& fp) {
  if (fp.degenerate || fp.transversal_det == Cx{0.0})
    throw DegeneratePoint("magnification: fixed point sits on a caustic");
  return Cx{1.0} / fp.transversal_det;
}

/// Solves for all complex fixed points and forms the magnification sums.
/// For a generic source of a structurally valid model the complex sum is 1;
/// that equality is the central claim this artifact checks, so it is never
/// assumed or enforced here — the report carries whatever was computed.
inline InvariantReport lefschetz_sum(const DeflectionModel& m, Cx zeta,
                                     const SolveOptions& opts = {}) {
  InvariantReport rep;
  rep.source = zeta;
  rep.model_name = m.name;
  rep.valid = true;

  for (const FixedPoint& fp : solve_fixed_points(m, zeta, opts)) {
    Cx mu{0.0};
    if (fp.degenerate || fp.transversal_det == Cx{0.0}) {
      rep.valid = false;
      if (fp.transversal_det != Cx{0.0}) mu = Cx{1.0} / fp.transversal_det;
    } else {
      mu = Cx{1.0} / fp.transversal_det;
    }
    if (fp.multiplicity > 1 || !fp.converged) rep.valid = false;
    if (fp.is_real && std::abs(mu.imag()) > 1e-8 * (1.0 + std::abs(mu))) rep.valid = false;
    rep.points.emplace_back(fp, mu);
  }

  Cx total{0.0};
  double real_total = 0.0;
  for (const auto& [fp, mu] : rep.points) {
    total += mu;
    if (fp.is_real) real_total += mu.real();
  }
  rep.complex_sum = total;
  rep.real_sum = real_total;

  for (int k : {0, 1, 2}) {
    Cx mk{0.0};
    for (const auto& [fp, mu] : rep.points) mk += mu * std::pow(fp.z1, k);
    rep.moments.emplace_back(k, mk);
  }
  return rep;
}

/// Sum of magnifications over the real images only. Coincides with the
/// complex sum (hence equals 1) exactly when every fixed point is real.
inline double real_invariant(const DeflectionModel& m, Cx zeta, const SolveOptions& opts = {}) {
  return lefschetz_sum(m, zeta, opts).real_sum;
}

/// k-th moment sum mu-weighted in the image position z1. The zeroth moment
/// is the plain magnification sum; higher ones are reported without an
/// asserted constant.
inline Cx moment_sum(const DeflectionModel& m, Cx zeta, int k, const SolveOptions& opts = {}) {
  if (k < 0) throw Error("moment_sum: order must be nonnegative");
  Cx mk{0.0};
  for (const auto& [fp, mu] : lefschetz_sum(m, zeta, opts).points) mk += mu * std::pow(fp.z1, k);
  return mk;
}

/// Gap between the two determinant code paths at a real image: the complex
/// transversality determinant evaluated at the fixed point against the real
/// lens-map Jacobian determinant at z1. Both compute the same matrix on the
/// real slice, so the residual is rounding-level for a correct model.
inline double jacobian_identity_residual(const DeflectionModel& m, const FixedPoint& fp) {
  if (!fp.is_real)
    throw NotRealImage("jacobian_identity_residual: fixed point is not a real image");
  const Cx via_complex = complex_jacobian(m, fp.z1, fp.z2).det();
  const double via_real = det_real_jacobian(m, fp.z1);
  return std::abs(via_complex - via_real);
}

}  // namespace cplens
