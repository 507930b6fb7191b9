#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/rational_fn.hpp"

namespace cplens {

/// Closed-form tag for the deflection potential. `none` marks models built
/// from raw coefficient tables, for which only the rational deflection is
/// known.
enum class PsiForm { point_ensemble, plummer, filament, none };

struct ModelParams {
  std::vector<double> masses;
  std::vector<Cx> positions;
  double sigma0 = 0.0;
  double theta_e = 0.0;
  double a = 0.0;
};

/// A lens whose complexified deflection is a pair of rational functions of
/// the independent variables z1, z2 (the second standing in for the
/// conjugate on the real slice z2 = conj(z1)). alpha2 represents the
/// conjugated deflection; built-in constructors derive it from alpha1 so the
/// two can never drift apart.
struct DeflectionModel {
  RationalFn alpha1;
  RationalFn alpha2;
  std::string name;
  PsiForm psi_form = PsiForm::none;
  ModelParams params;
};

/// Superposition of point lenses: alpha1 = sum_i m_i / (z2 - conj(c_i)),
/// combined over the common denominator prod_i (z2 - conj(c_i)).
inline DeflectionModel point_mass_ensemble(const std::vector<double>& masses,
                                           const std::vector<Cx>& positions) {
  if (masses.empty() || masses.size() != positions.size())
    throw Error("point_mass_ensemble: need equally many masses and positions, at least one");
  for (double m : masses) {
    require_finite(m, "mass");
    if (m <= 0.0) throw NonpositiveMass("point_mass_ensemble: mass must be positive");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    require_finite(positions[i], "position");
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (positions[i] == positions[j])
        throw DuplicatePosition("point_mass_ensemble: coincident lens positions");
  }

  // Denominator prod (z2 - conj c_i) and numerator sum m_i * (den / factor_i),
  // assembled as univariate polynomials in z2 and lifted.
  UniPoly den = UniPoly::one();
  for (Cx c : positions) den = den * UniPoly({-std::conj(c), Cx{1.0}});
  UniPoly num;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    UniPoly cof = UniPoly::constant(Cx{masses[i]});
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (j != i) cof = cof * UniPoly({-std::conj(positions[j]), Cx{1.0}});
    num += cof;
  }

  DeflectionModel m;
  m.alpha1 = RationalFn{BiPoly::lift(num, Var::z2), BiPoly::lift(den, Var::z2)};
  m.alpha2 = m.alpha1.conj_transpose();
  m.name = positions.size() == 1 ? "point" : "point-ensemble";
  m.psi_form = PsiForm::point_ensemble;
  m.params.masses = masses;
  m.params.positions = positions;
  return m;
}

/// Cored circular lens: alpha1 = theta_e^2 z1 / (z1 z2 + a^2).
inline DeflectionModel plummer(double theta_e, double a) {
  require_finite(theta_e, "theta_e");
  require_finite(a, "a");
  if (theta_e <= 0.0 || a <= 0.0)
    throw NonpositiveParameter("plummer: theta_e and a must be positive");
  DeflectionModel m;
  m.alpha1 = RationalFn{BiPoly::from_terms({{1, 0, Cx{theta_e * theta_e}}}),
                        BiPoly::from_terms({{1, 1, Cx{1.0}}, {0, 0, Cx{a * a}}})};
  m.alpha2 = m.alpha1.conj_transpose();
  m.name = "plummer";
  m.psi_form = PsiForm::plummer;
  m.params.theta_e = theta_e;
  m.params.a = a;
  return m;
}

/// Infinite line-density lens along the x2 axis:
/// alpha1 = alpha2 = -4 sigma0 / (z1 + z2).
inline DeflectionModel filament(double sigma0) {
  require_finite(sigma0, "sigma0");
  if (sigma0 <= 0.0) throw NonpositiveParameter("filament: sigma0 must be positive");
  DeflectionModel m;
  m.alpha1 = RationalFn{BiPoly::constant(Cx{-4.0 * sigma0}),
                        BiPoly::from_terms({{1, 0, Cx{1.0}}, {0, 1, Cx{1.0}}})};
  m.alpha2 = m.alpha1;
  m.name = "filament";
  m.psi_form = PsiForm::filament;
  m.params.sigma0 = sigma0;
  return m;
}

/// Model from explicit rational deflections. No potential form is attached,
/// and deliberately asymmetric pairs are allowed; validate() reports rather
/// than rejects.
inline DeflectionModel raw_model(RationalFn alpha1, RationalFn alpha2,
                                 std::string name = "raw") {
  DeflectionModel m;
  m.alpha1 = std::move(alpha1);
  m.alpha2 = std::move(alpha2);
  m.name = std::move(name);
  m.psi_form = PsiForm::none;
  return m;
}

struct ValidationReport {
  bool degree_ok = false;     // total deg num < total deg den for both deflections
  bool symmetry_ok = false;   // alpha2(z1,z2) = conj(alpha1) on the real slice
  bool decay_ok = false;      // deflection vanishes far from the lens
  std::string diagnostics;

  bool all_ok() const { return degree_ok && symmetry_ok && decay_ok; }
};

/// Checks the three structural conditions a rational deflection pair must
/// satisfy, by inspection and by sampling. Reports, never throws: raw models
/// are allowed to fail on purpose.
inline ValidationReport validate(const DeflectionModel& m) {
  ValidationReport rep;
  std::ostringstream diag;

  const int du1 = m.alpha1.num.total_degree(), dv1 = m.alpha1.den.total_degree();
  const int du2 = m.alpha2.num.total_degree(), dv2 = m.alpha2.den.total_degree();
  rep.degree_ok = du1 < dv1 && du2 < dv2;
  diag << "degrees: num " << du1 << "/" << du2 << " den " << dv1 << "/" << dv2 << "; ";

  // Conjugate symmetry sampled on two circles, skipping near-pole points.
  double worst_sym = 0.0;
  int used = 0;
  for (double r : {0.7, 1.9}) {
    for (int k = 0; k < 32; ++k) {
      const double th = 2.0 * std::numbers::pi * (double(k) + 0.37) / 32.0;
      const Cx z{r * std::cos(th), r * std::sin(th)};
      const Cx zb = std::conj(z);
      if (m.alpha1.den_margin(z, zb) < 1e-6 || m.alpha2.den_margin(z, zb) < 1e-6) continue;
      const Cx a1 = m.alpha1.eval(z, zb);
      const Cx a2 = m.alpha2.eval(z, zb);
      const double dev = std::abs(a2 - std::conj(a1)) / (1.0 + std::abs(a1));
      worst_sym = std::max(worst_sym, dev);
      ++used;
    }
  }
  rep.symmetry_ok = used > 0 && worst_sym <= 1e-12;
  diag << "symmetry: " << used << " samples, worst rel dev " << worst_sym << "; ";

  // Decay along rays to infinity, plus the sign-convention cross-check that
  // feeding eta(z) back as the source makes (z, conj z) a fixed point of the
  // deflection-augmented map.
  double worst_decay = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * std::numbers::pi * (double(k) + 0.21) / 8.0;
    const Cx z = 1e6 * Cx{std::cos(th), std::sin(th)};
    const Cx zb = std::conj(z);
    worst_decay = std::max(worst_decay, std::abs(m.alpha1.eval(z, zb)));
    worst_decay = std::max(worst_decay, std::abs(m.alpha2.eval(z, zb)));
  }
  rep.decay_ok = worst_decay < 1e-5;
  diag << "decay: max |deflection| at 1e6 = " << worst_decay << "; ";

  {
    const Cx z{0.83, -0.41};
    const Cx zb = std::conj(z);
    if (m.alpha1.den_margin(z, zb) > 1e-6) {
      const Cx zeta = z - m.alpha1.eval(z, zb);
      // P1 = (z1 - zeta) V1 - U1 must vanish at the probe if conventions agree.
      const Cx p1 = (z - zeta) * m.alpha1.den.eval(z, zb) - m.alpha1.num.eval(z, zb);
      const double scale = m.alpha1.den.eval_bound(z, zb) + m.alpha1.num.eval_bound(z, zb);
      diag << "fixed-point consistency residual " << std::abs(p1) / scale;
    } else {
      diag << "fixed-point probe skipped (near pole)";
    }
  }

  rep.diagnostics = diag.str();
  return rep;
}

}  // namespace cplens
