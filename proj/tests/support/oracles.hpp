#pragma once

#include <vector>

#include "twhe/fft.hpp"
#include "twhe/geometry.hpp"

namespace twhe::testing {

// Solution of sqrt(-1) Lambda dbar d s + eps s = -sqrt(-1) Lambda dbar d psi
// on a flat torus, mode by mode with the discrete symbol of the
// finite-difference operator.
inline RealField helmholtz_oracle(const RealField& psi, double eps, const TorusGeometry& geom) {
  const Grid& g = *psi.grid();
  std::vector<cd> hat(psi.data().begin(), psi.data().end());
  fft_forward(g, hat);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double sym = ddbar_symbol(g, geom.base(), k);
    hat[k] *= -sym / (sym + eps);
  }
  fft_backward(g, hat);
  RealField s(psi.grid());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = hat[i].real();
  return s;
}

// Same with the continuum symbol 2 pi^2 |k|^2 of a unit flat torus, for a
// single mode psi = a cos(2 pi x): s = -2 pi^2 / (2 pi^2 + eps) psi.
inline double helmholtz_continuum_factor(double eps) { return -2 * kPi * kPi / (2 * kPi * kPi + eps); }

}  // namespace twhe::testing
