#pragma once

#include <cstddef>
#include <vector>

#include "cplens/bipoly.hpp"
#include "cplens/errors.hpp"
#include "cplens/unipoly.hpp"

namespace cplens {

namespace detail {

/// Determinant of a square matrix of polynomials by fraction-free (Bareiss)
/// elimination. Row swaps pick the candidate pivot with the largest
/// coefficient magnitude; each swap flips the sign.
inline UniPoly poly_matrix_det(std::vector<std::vector<UniPoly>> m) {
  const std::size_t n = m.size();
  if (n == 0) return UniPoly::one();
  double sign = 1.0;
  UniPoly prev = UniPoly::one();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t best = k;
    double best_mag = m[k][k].max_coeff_mag();
    for (std::size_t r = k + 1; r < n; ++r) {
      double mag = m[r][k].max_coeff_mag();
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (best_mag == 0.0) return UniPoly{};  // singular column
    if (best != k) {
      std::swap(m[best], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]).divide_exact(prev);
      m[i][k] = UniPoly{};
    }
    prev = m[k][k];
  }
  return Cx{sign} * m[n - 1][n - 1];
}

}  // namespace detail

/// Sylvester matrix of p, q viewed as polynomials in z2 whose coefficients
/// are polynomials in z1.
inline std::vector<std::vector<UniPoly>> sylvester_z2(const BiPoly& p, const BiPoly& q) {
  const int dp = p.degree2(), dq = q.degree2();
  const std::size_t n = std::size_t(dp + dq);
  std::vector<std::vector<UniPoly>> m(n, std::vector<UniPoly>(n));
  for (int r = 0; r < dq; ++r)
    for (int j = 0; j <= dp; ++j) m[std::size_t(r)][std::size_t(r + j)] = p.coeff_of_z2(dp - j);
  for (int r = 0; r < dp; ++r)
    for (int j = 0; j <= dq; ++j) m[std::size_t(dq + r)][std::size_t(r + j)] = q.coeff_of_z2(dq - j);
  return m;
}

/// Resultant of p and q with respect to z2, a univariate polynomial in z1.
/// It vanishes at every z1 admitting a common root in z2, plus possibly at
/// spurious values from vanishing leading coefficients; callers filter
/// candidates by residual on the original system.
inline UniPoly resultant_z2(const BiPoly& p, const BiPoly& q) {
  if (p.degree2() < 1 || q.degree2() < 1)
    throw DegenerateElimination("resultant_z2: an input has degree 0 in z2");
  return detail::poly_matrix_det(sylvester_z2(p, q));
}

/// Resultant with respect to z1 (variable-swapped elimination).
inline UniPoly resultant_z1(const BiPoly& p, const BiPoly& q) {
  if (p.degree1() < 1 || q.degree1() < 1)
    throw DegenerateElimination("resultant_z1: an input has degree 0 in z1");
  return detail::poly_matrix_det(sylvester_z2(p.swap_vars(), q.swap_vars()));
}

}  // namespace cplens
