#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cplens/lens_map.hpp"
#include "cplens/model.hpp"

using namespace cplens;
using Catch::Matchers::WithinAbs;

namespace {

// Five-point central Laplacian of the arrival-time surface at x. The
// geometric term contributes exactly 2, so sigma = (2 - laplacian)/2.
double fd_surface_density(const DeflectionModel& m, Cx x, Cx y, double h = 1e-4) {
  const double lap = (fermat_potential(m, x + Cx{h, 0.0}, y) + fermat_potential(m, x - Cx{h, 0.0}, y) +
                      fermat_potential(m, x + Cx{0.0, h}, y) + fermat_potential(m, x - Cx{0.0, h}, y) -
                      4.0 * fermat_potential(m, x, y)) /
                     (h * h);
  return 0.5 * (2.0 - lap);
}

}  // namespace

TEST_CASE("point ensembles assemble over a common denominator", "[lens]") {
  SECTION("single mass at the origin") {
    DeflectionModel m = point_mass_ensemble({1.0}, {Cx{0.0}});
    REQUIRE_THAT(std::abs(m.alpha1.eval(Cx{9.0}, Cx{2.0}) - Cx{0.5}), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(std::abs(m.alpha2.eval(Cx{2.0}, Cx{9.0}) - Cx{0.5}), WithinAbs(0.0, 1e-15));
    REQUIRE(m.psi_form == PsiForm::point_ensemble);
  }

  SECTION("equal binary at +-1/2") {
    DeflectionModel m = point_mass_ensemble({0.5, 0.5}, {Cx{0.5}, Cx{-0.5}});
    // Combined: z2 / (z2^2 - 1/4).
    REQUIRE(m.alpha1.num.total_degree() == 1);
    REQUIRE(m.alpha1.den.total_degree() == 2);
    const Cx z2{1.5};
    REQUIRE_THAT(std::abs(m.alpha1.eval(Cx{0.0}, z2) - z2 / (z2 * z2 - 0.25)),
                 WithinAbs(0.0, 1e-14));
    REQUIRE(validate(m).all_ok());
  }

  SECTION("construction errors") {
    REQUIRE_THROWS_AS(point_mass_ensemble({1.0, -1.0}, {Cx{0.0}, Cx{1.0}}), NonpositiveMass);
    REQUIRE_THROWS_AS(point_mass_ensemble({1.0, 1.0}, {Cx{0.5}, Cx{0.5}}), DuplicatePosition);
    REQUIRE_THROWS_AS(point_mass_ensemble({}, {}), Error);
  }
}

TEST_CASE("cored and filament constructors", "[lens]") {
  SECTION("plummer closed form") {
    DeflectionModel m = plummer(1.0, 1.0);
    REQUIRE_THAT(std::abs(m.alpha1.eval(Cx{1.0}, Cx{1.0}) - Cx{0.5}), WithinAbs(0.0, 1e-15));
    REQUIRE(m.alpha1.num.total_degree() == 1);
    REQUIRE(m.alpha1.den.total_degree() == 2);
    REQUIRE(std::abs(m.alpha1.eval(Cx{1e7}, Cx{1e7})) < 1e-6);
    REQUIRE_THROWS_AS(plummer(0.0, 1.0), NonpositiveParameter);
    REQUIRE_THROWS_AS(plummer(1.0, -2.0), NonpositiveParameter);
  }

  SECTION("filament closed form") {
    DeflectionModel m = filament(0.125);
    REQUIRE_THAT(std::abs(m.alpha1.eval(Cx{1.0}, Cx{1.0}) - Cx{-0.25}), WithinAbs(0.0, 1e-15));
    REQUIRE(m.alpha1.num.total_degree() == 0);
    REQUIRE(m.alpha1.den.total_degree() == 1);
    REQUIRE_THROWS_AS(filament(0.0), NonpositiveParameter);
  }
}

TEST_CASE("validation separates sound and broken models", "[lens]") {
  for (const DeflectionModel& m :
       {point_mass_ensemble({1.0}, {Cx{0.0}}),
        point_mass_ensemble({0.6, 0.4}, {Cx{0.5, 0.1}, Cx{-0.5}}), plummer(1.0, 0.7),
        filament(0.125)}) {
    ValidationReport rep = validate(m);
    INFO(m.name << ": " << rep.diagnostics);
    CHECK(rep.all_ok());
  }

  SECTION("asymmetric raw pair fails symmetry only") {
    RationalFn a1{BiPoly::one(), BiPoly::var_z2()};
    RationalFn a2{BiPoly::constant(Cx{2.0}), BiPoly::var_z1()};
    ValidationReport rep = validate(raw_model(a1, a2));
    REQUIRE(rep.degree_ok);
    REQUIRE_FALSE(rep.symmetry_ok);
    REQUIRE(rep.decay_ok);
  }

  SECTION("degree violation is flagged") {
    RationalFn a1{BiPoly::var_z1(), BiPoly::var_z2()};
    ValidationReport rep = validate(raw_model(a1, a1.conj_transpose()));
    REQUIRE_FALSE(rep.degree_ok);
  }
}

TEST_CASE("real lens map values and guards", "[lens]") {
  DeflectionModel pm = point_mass_ensemble({1.0}, {Cx{0.0}});
  REQUIRE_THAT(std::abs(lens_map_real(pm, Cx{2.0}) - Cx{1.5}), WithinAbs(0.0, 1e-15));
  REQUIRE_THROWS_AS(lens_map_real(pm, Cx{0.0}), PoleEvaluation);

  DeflectionModel fil = filament(0.125);
  REQUIRE_THAT(std::abs(lens_map_real(fil, Cx{1.8660254037844386}) - Cx{2.0}),
               WithinAbs(0.0, 1e-12));

  SECTION("far field is the identity") {
    for (const DeflectionModel& m : {pm, plummer(1.0, 1.0), fil}) {
      const Cx z = 1e6 * Cx{std::cos(0.4), std::sin(0.4)};
      REQUIRE(std::abs(lens_map_real(m, z) - z) < 1e-5);
    }
  }

  SECTION("commutes with conjugation through the second deflection") {
    DeflectionModel bin = point_mass_ensemble({0.7, 0.3}, {Cx{0.4, 0.2}, Cx{-0.6, -0.1}});
    for (Cx z : {Cx{1.3, 0.4}, Cx{-0.9, 1.1}, Cx{2.0, -0.3}}) {
      const Cx via_a2 = std::conj(z) - bin.alpha2.eval(z, std::conj(z));
      REQUIRE(std::abs(std::conj(lens_map_real(bin, z)) - via_a2) <=
              1e-12 * (1.0 + std::abs(via_a2)));
    }
  }
}

TEST_CASE("jacobians of the lens map", "[lens]") {
  SECTION("point mass entries and determinant") {
    DeflectionModel m = point_mass_ensemble({1.0}, {Cx{0.0}});
    Mat2c j = complex_jacobian(m, Cx{2.0}, Cx{2.0});
    REQUIRE_THAT(std::abs(j.a11 - Cx{1.0}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(j.a12 - Cx{0.25}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(j.a21 - Cx{0.25}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(j.a22 - Cx{1.0}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(j.det() - Cx{15.0 / 16.0}), WithinAbs(0.0, 1e-14));
  }

  SECTION("filament determinant matches 1 - 2 sigma0/x1^2") {
    DeflectionModel m = filament(0.125);
    REQUIRE_THAT(det_real_jacobian(m, Cx{1.0}), WithinAbs(0.75, 1e-14));
    const double x = 1.8660254037844386;
    REQUIRE_THAT(det_real_jacobian(m, Cx{x}), WithinAbs(1.0 - 0.25 / (x * x), 1e-14));
  }

  SECTION("einstein ring of the unit point mass is critical") {
    DeflectionModel m = point_mass_ensemble({1.0}, {Cx{0.0}});
    const Cx z{std::cos(0.3), std::sin(0.3)};
    REQUIRE_THAT(det_real_jacobian(m, z), WithinAbs(0.0, 1e-13));
  }

  SECTION("zero deflection gives the identity") {
    DeflectionModel m = raw_model(RationalFn{BiPoly{}, BiPoly::var_z2()},
                                  RationalFn{BiPoly{}, BiPoly::var_z1()});
    REQUIRE_THAT(det_real_jacobian(m, Cx{0.7, -0.2}), WithinAbs(1.0, 1e-15));
  }

  SECTION("imaginary determinant on the real slice is rejected") {
    RationalFn a1{BiPoly::one(), BiPoly::var_z2()};
    RationalFn a2{BiPoly::constant(Cx{0.0, 2.0}), BiPoly::var_z1()};
    DeflectionModel m = raw_model(a1, a2);
    REQUIRE_THROWS_AS(det_real_jacobian(m, Cx{2.0}), SymmetryViolation);
  }

  SECTION("pole guard") {
    DeflectionModel m = plummer(1.0, 0.5);
    // z1 z2 + a^2 = 0 on the real slice never happens (|z|^2 >= 0), so probe
    // the complex extension where the denominator does vanish.
    REQUIRE_THROWS_AS(complex_jacobian(m, Cx{0.5}, Cx{-0.5}), PoleEvaluation);
  }
}

TEST_CASE("arrival-time surface and its singularities", "[lens]") {
  DeflectionModel pm = point_mass_ensemble({1.0}, {Cx{0.0}});
  REQUIRE_THAT(fermat_potential(pm, Cx{2.0}, Cx{1.5}), WithinAbs(-0.5681471805599453, 1e-14));
  REQUIRE_THROWS_AS(fermat_potential(pm, Cx{0.0}, Cx{1.0}), PotentialSingularity);

  DeflectionModel fil = filament(0.125);
  REQUIRE_THROWS_AS(fermat_potential(fil, Cx{0.0, 1.0}, Cx{1.0}), PotentialSingularity);

  DeflectionModel raw = raw_model(RationalFn{BiPoly::one(), BiPoly::var_z2()},
                                  RationalFn{BiPoly::one(), BiPoly::var_z1()});
  REQUIRE_THROWS_AS(fermat_potential(raw, Cx{1.0}, Cx{0.0}), NoPotentialForm);
  REQUIRE_THROWS_AS(surface_density(raw, Cx{1.0}), NoPotentialForm);
}

TEST_CASE("surface density closed forms", "[lens]") {
  REQUIRE_THAT(surface_density(filament(0.125), Cx{0.5, 3.0}), WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(surface_density(point_mass_ensemble({1.0}, {Cx{0.0}}), Cx{0.3, 0.4}),
               WithinAbs(0.0, 0.0));
  const double at_origin = surface_density(plummer(1.0, 1.0), Cx{0.0});
  REQUIRE(at_origin > 0.0);
  REQUIRE_THAT(at_origin, WithinAbs(1.0, 1e-15));
}

TEST_CASE("potential and density satisfy the Poisson relation", "[lens]") {
  std::mt19937 rng(2026u);
  std::uniform_real_distribution<double> radius(0.4, 2.0), angle(0.0, 6.283185307179586);
  const Cx y{0.1, -0.2};

  auto check = [&](const DeflectionModel& m, auto&& admissible) {
    int done = 0;
    while (done < 50) {
      const double r = radius(rng), th = angle(rng);
      const Cx x{r * std::cos(th), r * std::sin(th)};
      if (!admissible(x)) continue;
      const double sigma = surface_density(m, x);
      const double fd = fd_surface_density(m, x, y);
      INFO(m.name << " at " << x.real() << "," << x.imag());
      REQUIRE_THAT(fd, WithinAbs(sigma, 1e-3 * (1.0 + std::abs(sigma))));
      ++done;
    }
  };

  check(point_mass_ensemble({0.8, 0.7}, {Cx{0.5}, Cx{-0.5, 0.2}}), [](Cx x) {
    return std::abs(x - Cx{0.5}) > 0.3 && std::abs(x - Cx{-0.5, 0.2}) > 0.3;
  });
  check(plummer(1.2, 0.8), [](Cx) { return true; });
  check(filament(0.125), [](Cx x) { return std::abs(x.real()) > 0.3; });
}
