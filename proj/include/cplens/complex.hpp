#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace cplens {

// Dimensionless angle coordinates throughout (Einstein-radius-like units).
using Cx = std::complex<double>;

inline bool is_finite(Cx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(Cx z, const char* what) {
  if (!is_finite(z)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

}  // namespace cplens
