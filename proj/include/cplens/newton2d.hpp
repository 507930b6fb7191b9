#pragma once

#include <cmath>
#include <utility>

#include "cplens/bipoly.hpp"
#include "cplens/complex.hpp"

namespace cplens {

struct Newton2dResult {
  Cx z1, z2;
  double residual = 0.0;  // normalized: max_mu |P_mu| / eval_bound
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double system_residual(const BiPoly& p1, const BiPoly& p2, Cx z1, Cx z2) {
  const double b1 = p1.eval_bound(z1, z2);
  const double b2 = p2.eval_bound(z1, z2);
  const double r1 = b1 > 0.0 ? std::abs(p1.eval(z1, z2)) / b1 : 0.0;
  const double r2 = b2 > 0.0 ? std::abs(p2.eval(z1, z2)) / b2 : 0.0;
  return std::max(r1, r2);
}

}  // namespace detail

/// Newton iteration on the pair (p1, p2) in the two independent complex
/// variables, started from (z1, z2). Each proposed step is halved (up to 20
/// times) until the normalized residual does not increase, so the residual
/// over accepted steps is monotonically non-increasing. Stops when the
/// residual reaches `tol`, when damping cannot improve it any further, or
/// when the Jacobian determinant falls below roughly machine scale.
inline Newton2dResult polish_2d(const BiPoly& p1, const BiPoly& p2, Cx z1, Cx z2,
                                double tol = 1e-14, int max_iter = 50) {
  const BiPoly d11 = p1.partial(Var::z1), d12 = p1.partial(Var::z2);
  const BiPoly d21 = p2.partial(Var::z1), d22 = p2.partial(Var::z2);

  Newton2dResult res;
  res.z1 = z1;
  res.z2 = z2;
  res.residual = detail::system_residual(p1, p2, z1, z2);

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    const Cx f1 = p1.eval(res.z1, res.z2);
    const Cx f2 = p2.eval(res.z1, res.z2);
    const Cx a = d11.eval(res.z1, res.z2), b = d12.eval(res.z1, res.z2);
    const Cx cc = d21.eval(res.z1, res.z2), d = d22.eval(res.z1, res.z2);
    const Cx det = a * d - b * cc;
    const double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(cc);
    if (std::abs(det) <= 1e-14 * (1.0 + scale)) break;  // singular: keep best point

    // Cramer solve J * step = f.
    const Cx s1 = (d * f1 - b * f2) / det;
    const Cx s2 = (a * f2 - cc * f1) / det;

    double lambda = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 20; ++halvings, lambda *= 0.5) {
      const Cx t1 = res.z1 - lambda * s1;
      const Cx t2 = res.z2 - lambda * s2;
      const double r = detail::system_residual(p1, p2, t1, t2);
      if (r <= res.residual) {
        res.z1 = t1;
        res.z2 = t2;
        res.residual = r;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled at a local floor
  }
  res.converged = res.residual <= tol;
  return res;
}

}  // namespace cplens
