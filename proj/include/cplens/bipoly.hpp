#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "cplens/complex.hpp"
#include "cplens/unipoly.hpp"

namespace cplens {

enum class Var { z1, z2 };

/// Bivariate polynomial sum c[i][j] z1^i z2^j. Trailing all-zero rows and
/// columns are trimmed; the zero polynomial has empty storage.
class BiPoly {
 public:
  struct Term {
    int i, j;
    Cx c;
  };

  BiPoly() = default;

  BiPoly(int deg1, int deg2, std::vector<Cx> coeffs) : n1_(deg1), n2_(deg2), c_(std::move(coeffs)) {
    trim();
  }

  static BiPoly from_terms(std::initializer_list<Term> terms) {
    return from_terms(std::vector<Term>(terms));
  }

  static BiPoly from_terms(const std::vector<Term>& terms) {
    int d1 = -1, d2 = -1;
    for (const Term& t : terms) {
      d1 = std::max(d1, t.i);
      d2 = std::max(d2, t.j);
    }
    if (d1 < 0) return BiPoly{};
    std::vector<Cx> c(std::size_t(d1 + 1) * std::size_t(d2 + 1), Cx{0.0});
    for (const Term& t : terms) c[std::size_t(t.i) * std::size_t(d2 + 1) + std::size_t(t.j)] += t.c;
    return BiPoly(d1, d2, std::move(c));
  }

  static BiPoly constant(Cx v) { return from_terms({{0, 0, v}}); }
  static BiPoly one() { return constant(Cx{1.0}); }
  static BiPoly var_z1() { return from_terms({{1, 0, Cx{1.0}}}); }
  static BiPoly var_z2() { return from_terms({{0, 1, Cx{1.0}}}); }

  /// Lifts a univariate polynomial into the chosen variable.
  static BiPoly lift(const UniPoly& p, Var v) {
    std::vector<Term> ts;
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
      if (p.coeffs()[k] != Cx{0.0})
        ts.push_back(v == Var::z1 ? Term{int(k), 0, p.coeffs()[k]} : Term{0, int(k), p.coeffs()[k]});
    }
    return from_terms(ts);
  }

  bool is_zero() const { return c_.empty(); }
  int degree1() const { return n1_; }
  int degree2() const { return n2_; }

  int total_degree() const {
    int d = -1;
    for (int i = 0; i <= n1_; ++i)
      for (int j = 0; j <= n2_; ++j)
        if (at(i, j) != Cx{0.0}) d = std::max(d, i + j);
    return d;
  }

  Cx at(int i, int j) const {
    if (i < 0 || j < 0 || i > n1_ || j > n2_) return Cx{0.0};
    return c_[std::size_t(i) * std::size_t(n2_ + 1) + std::size_t(j)];
  }

  double max_coeff_mag() const {
    double m = 0.0;
    for (Cx v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Horner evaluation, nested in z2 then z1.
  Cx eval(Cx z1, Cx z2) const {
    Cx acc{0.0};
    for (int i = n1_; i >= 0; --i) {
      Cx row{0.0};
      for (int j = n2_; j >= 0; --j) row = row * z2 + at(i, j);
      acc = acc * z1 + row;
    }
    return acc;
  }

  /// sum |c_ij| |z1|^i |z2|^j, the evaluation-magnitude scale at (z1, z2).
  double eval_bound(Cx z1, Cx z2) const {
    const double a1 = std::abs(z1), a2 = std::abs(z2);
    double acc = 0.0;
    for (int i = n1_; i >= 0; --i) {
      double row = 0.0;
      for (int j = n2_; j >= 0; --j) row = row * a2 + std::abs(at(i, j));
      acc = acc * a1 + row;
    }
    return acc;
  }

  /// Formal partial derivative.
  BiPoly partial(Var v) const {
    if (is_zero()) return BiPoly{};
    std::vector<Term> ts;
    for (int i = 0; i <= n1_; ++i)
      for (int j = 0; j <= n2_; ++j) {
        Cx cij = at(i, j);
        if (cij == Cx{0.0}) continue;
        if (v == Var::z1 && i > 0) ts.push_back({i - 1, j, double(i) * cij});
        if (v == Var::z2 && j > 0) ts.push_back({i, j - 1, double(j) * cij});
      }
    return from_terms(ts);
  }

  /// Restriction z1 = c, as a univariate polynomial in z2.
  UniPoly substitute_z1(Cx c) const {
    std::vector<Cx> out(std::size_t(n2_ + 1), Cx{0.0});
    for (int j = 0; j <= n2_; ++j) {
      Cx acc{0.0};
      for (int i = n1_; i >= 0; --i) acc = acc * c + at(i, j);
      out[std::size_t(j)] = acc;
    }
    return UniPoly(std::move(out));
  }

  /// Restriction z2 = c, as a univariate polynomial in z1.
  UniPoly substitute_z2(Cx c) const {
    std::vector<Cx> out(std::size_t(n1_ + 1), Cx{0.0});
    for (int i = 0; i <= n1_; ++i) {
      Cx acc{0.0};
      for (int j = n2_; j >= 0; --j) acc = acc * c + at(i, j);
      out[std::size_t(i)] = acc;
    }
    return UniPoly(std::move(out));
  }

  /// Coefficient of z2^j as a polynomial in z1.
  UniPoly coeff_of_z2(int j) const {
    std::vector<Cx> out(std::size_t(n1_ + 1), Cx{0.0});
    if (j < 0 || j > n2_) return UniPoly{};
    for (int i = 0; i <= n1_; ++i) out[std::size_t(i)] = at(i, j);
    return UniPoly(std::move(out));
  }

  BiPoly swap_vars() const {
    if (is_zero()) return BiPoly{};
    std::vector<Cx> c(c_.size());
    for (int i = 0; i <= n1_; ++i)
      for (int j = 0; j <= n2_; ++j) c[std::size_t(j) * std::size_t(n1_ + 1) + std::size_t(i)] = at(i, j);
    return BiPoly(n2_, n1_, std::move(c));
  }

  /// Coefficient-conjugated, index-transposed copy: c[i][j] -> conj(c[j][i]).
  /// Carries alpha1 into the matching alpha2 for conjugate-symmetric models.
  BiPoly conj_transpose() const {
    if (is_zero()) return BiPoly{};
    std::vector<Cx> c(c_.size());
    for (int i = 0; i <= n1_; ++i)
      for (int j = 0; j <= n2_; ++j)
        c[std::size_t(j) * std::size_t(n1_ + 1) + std::size_t(i)] = std::conj(at(i, j));
    return BiPoly(n2_, n1_, std::move(c));
  }

  BiPoly& operator+=(const BiPoly& o) { return *this = combined(*this, o, Cx{1.0}); }
  BiPoly& operator-=(const BiPoly& o) { return *this = combined(*this, o, Cx{-1.0}); }
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }

  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    if (a.is_zero() || b.is_zero()) return BiPoly{};
    int d1 = a.n1_ + b.n1_, d2 = a.n2_ + b.n2_;
    std::vector<Cx> c(std::size_t(d1 + 1) * std::size_t(d2 + 1), Cx{0.0});
    for (int i = 0; i <= a.n1_; ++i)
      for (int j = 0; j <= a.n2_; ++j) {
        Cx aij = a.at(i, j);
        if (aij == Cx{0.0}) continue;
        for (int k = 0; k <= b.n1_; ++k)
          for (int l = 0; l <= b.n2_; ++l)
            c[std::size_t(i + k) * std::size_t(d2 + 1) + std::size_t(j + l)] += aij * b.at(k, l);
      }
    return BiPoly(d1, d2, std::move(c));
  }

  friend BiPoly operator*(Cx s, BiPoly p) {
    for (Cx& v : p.c_) v *= s;
    p.trim();
    return p;
  }

 private:
  static BiPoly combined(const BiPoly& a, const BiPoly& b, Cx sb) {
    int d1 = std::max(a.n1_, b.n1_), d2 = std::max(a.n2_, b.n2_);
    if (d1 < 0) return BiPoly{};
    std::vector<Cx> c(std::size_t(d1 + 1) * std::size_t(d2 + 1), Cx{0.0});
    for (int i = 0; i <= d1; ++i)
      for (int j = 0; j <= d2; ++j)
        c[std::size_t(i) * std::size_t(d2 + 1) + std::size_t(j)] = a.at(i, j) + sb * b.at(i, j);
    return BiPoly(d1, d2, std::move(c));
  }

  void trim() {
    double m = max_coeff_mag();
    const double floor = m * kCoeffTrimRel;
    int d1 = -1, d2 = -1;
    for (int i = 0; i <= n1_; ++i)
      for (int j = 0; j <= n2_; ++j)
        if (std::abs(at(i, j)) > floor) {
          d1 = std::max(d1, i);
          d2 = std::max(d2, j);
        }
    if (d1 < 0) {
      c_.clear();
      n1_ = n2_ = -1;
      return;
    }
    std::vector<Cx> c(std::size_t(d1 + 1) * std::size_t(d2 + 1), Cx{0.0});
    for (int i = 0; i <= d1; ++i)
      for (int j = 0; j <= d2; ++j) {
        Cx v = at(i, j);
        c[std::size_t(i) * std::size_t(d2 + 1) + std::size_t(j)] = std::abs(v) > floor ? v : Cx{0.0};
      }
    c_ = std::move(c);
    n1_ = d1;
    n2_ = d2;
  }

  int n1_ = -1, n2_ = -1;
  std::vector<Cx> c_;
};

}  // namespace cplens
