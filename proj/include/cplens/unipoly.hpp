#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"

namespace cplens {

// Relative magnitude below which a coefficient counts as elimination noise.
inline constexpr double kCoeffTrimRel = 1e-14;

/// Univariate polynomial with complex coefficients, ascending degree.
/// The zero polynomial is canonically the empty coefficient vector.
class UniPoly {
 public:
  UniPoly() = default;

  explicit UniPoly(std::vector<Cx> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static UniPoly constant(Cx c) { return UniPoly({c}); }
  static UniPoly one() { return constant(Cx{1.0, 0.0}); }
  static UniPoly variable() { return UniPoly({Cx{0.0}, Cx{1.0}}); }

  const std::vector<Cx>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Cx coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Cx{0.0}; }
  Cx leading() const { return coeffs_.empty() ? Cx{0.0} : coeffs_.back(); }

  double max_coeff_mag() const {
    double m = 0.0;
    for (Cx c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Cx eval(Cx z) const {
    Cx acc{0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Magnitude bound sum |c_k| |z|^k, the natural scale for backward-error
  /// tests of an evaluation at z.
  double eval_bound(Cx z) const {
    double az = std::abs(z);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * az + std::abs(*it);
    return acc;
  }

  UniPoly derivative() const {
    if (coeffs_.size() <= 1) return UniPoly{};
    std::vector<Cx> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = double(k) * coeffs_[k];
    return UniPoly(std::move(d));
  }

  UniPoly& operator+=(const UniPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Cx{0.0});
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    trim();
    return *this;
  }

  UniPoly& operator-=(const UniPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Cx{0.0});
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    trim();
    return *this;
  }

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }

  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly{};
    std::vector<Cx> c(a.coeffs_.size() + b.coeffs_.size() - 1, Cx{0.0});
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return UniPoly(std::move(c));
  }

  friend UniPoly operator*(Cx s, UniPoly p) {
    for (Cx& c : p.coeffs_) c *= s;
    p.trim();
    return p;
  }

  /// Quotient of division by d when d divides this exactly (up to rounding),
  /// as in fraction-free elimination. The residue left by rounding noise is
  /// discarded.
  UniPoly divide_exact(const UniPoly& d) const {
    if (d.is_zero()) throw Error("UniPoly::divide_exact: division by zero polynomial");
    if (is_zero()) return UniPoly{};
    if (degree() < d.degree()) return UniPoly{};  // noise-only numerator
    std::vector<Cx> rem = coeffs_;
    std::vector<Cx> quot(coeffs_.size() - d.coeffs_.size() + 1, Cx{0.0});
    const Cx lead = d.coeffs_.back();
    for (int k = static_cast<int>(quot.size()) - 1; k >= 0; --k) {
      Cx q = rem[k + d.coeffs_.size() - 1] / lead;
      quot[k] = q;
      for (std::size_t j = 0; j < d.coeffs_.size(); ++j) rem[k + j] -= q * d.coeffs_[j];
    }
    return UniPoly(std::move(quot));
  }

 private:
  void trim() {
    double m = max_coeff_mag();
    const double floor = m * kCoeffTrimRel;
    while (!coeffs_.empty() && std::abs(coeffs_.back()) <= floor) coeffs_.pop_back();
    if (m == 0.0) coeffs_.clear();
  }

  std::vector<Cx> coeffs_;
};

}  // namespace cplens
