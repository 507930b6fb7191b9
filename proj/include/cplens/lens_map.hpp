#pragma once

#include <cmath>
#include <cstddef>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/model.hpp"

namespace cplens {

// Relative denominator margin below which evaluation counts as on a pole.
inline constexpr double kPoleMargin = 1e-12;

struct Mat2c {
  Cx a11, a12, a21, a22;
  Cx det() const { return a11 * a22 - a12 * a21; }
};

namespace detail {

inline void require_off_pole(const DeflectionModel& m, Cx z1, Cx z2) {
  if (m.alpha1.den_margin(z1, z2) < kPoleMargin || m.alpha2.den_margin(z1, z2) < kPoleMargin)
    throw PoleEvaluation("evaluation on a deflection pole");
}

}  // namespace detail

/// The real lens map eta(z) = z - alpha(z, conj z), taking an image-plane
/// position to the source position it maps to.
inline Cx lens_map_real(const DeflectionModel& m, Cx z) {
  require_finite(z, "lens_map_real");
  const Cx zb = std::conj(z);
  if (m.alpha1.den_margin(z, zb) < kPoleMargin)
    throw PoleEvaluation("lens_map_real: z is on a deflection pole");
  return z - m.alpha1.eval(z, zb);
}

/// The 2x2 complex matrix with rows (1 - d alpha1/d z1, -d alpha1/d z2) and
/// (-d alpha2/d z1, 1 - d alpha2/d z2). On the real slice z2 = conj(z1) it
/// is the complexification of the real lens-map Jacobian, so both share one
/// determinant.
inline Mat2c complex_jacobian(const DeflectionModel& m, Cx z1, Cx z2) {
  require_finite(z1, "complex_jacobian");
  require_finite(z2, "complex_jacobian");
  detail::require_off_pole(m, z1, z2);
  return {Cx{1.0} - m.alpha1.partial_eval(Var::z1, z1, z2),
          -m.alpha1.partial_eval(Var::z2, z1, z2),
          -m.alpha2.partial_eval(Var::z1, z1, z2),
          Cx{1.0} - m.alpha2.partial_eval(Var::z2, z1, z2)};
}

/// Determinant of the lens-map Jacobian at the real point z. Its inverse is
/// the signed image magnification. For a conjugate-symmetric deflection the
/// determinant is real up to rounding; a larger imaginary part means the
/// model's two deflection components are inconsistent.
inline double det_real_jacobian(const DeflectionModel& m, Cx z) {
  const Cx d = complex_jacobian(m, z, std::conj(z)).det();
  if (std::abs(d.imag()) > 1e-10 * (1.0 + std::abs(d)))
    throw SymmetryViolation("det_real_jacobian: determinant has a non-real part");
  return d.real();
}

/// Arrival-time surface (x - y)^2/2 - Psi(x) for models carrying a
/// closed-form potential.
inline double fermat_potential(const DeflectionModel& m, Cx x, Cx y) {
  require_finite(x, "fermat_potential");
  require_finite(y, "fermat_potential");
  const double geom = 0.5 * std::norm(x - y);
  switch (m.psi_form) {
    case PsiForm::point_ensemble: {
      double psi = 0.0;
      for (std::size_t i = 0; i < m.params.masses.size(); ++i) {
        const double r = std::abs(x - m.params.positions[i]);
        if (r == 0.0)
          throw PotentialSingularity("fermat_potential: x coincides with a lens position");
        psi += m.params.masses[i] * std::log(r);
      }
      return geom - psi;
    }
    case PsiForm::plummer: {
      const double t2 = m.params.theta_e * m.params.theta_e;
      return geom - 0.5 * t2 * std::log(m.params.a * m.params.a + std::norm(x));
    }
    case PsiForm::filament: {
      if (x.real() == 0.0)
        throw PotentialSingularity("fermat_potential: x on the filament axis");
      return geom + 2.0 * m.params.sigma0 * std::log(std::abs(x.real()));
    }
    case PsiForm::none:
      break;
  }
  throw NoPotentialForm("fermat_potential: model has no closed-form potential");
}

/// Dimensionless surface density, half the Laplacian of the potential.
inline double surface_density(const DeflectionModel& m, Cx x) {
  require_finite(x, "surface_density");
  switch (m.psi_form) {
    case PsiForm::point_ensemble:
      return 0.0;  // vacuum away from the point supports
    case PsiForm::plummer: {
      const double t2 = m.params.theta_e * m.params.theta_e;
      const double a2 = m.params.a * m.params.a;
      const double s = a2 + std::norm(x);
      return t2 * a2 / (s * s);
    }
    case PsiForm::filament: {
      const double x1 = x.real();
      return m.params.sigma0 / (x1 * x1);
    }
    case PsiForm::none:
      break;
  }
  throw NoPotentialForm("surface_density: model has no closed-form potential");
}

}  // namespace cplens
