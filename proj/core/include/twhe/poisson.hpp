#pragma once

#include "twhe/geometry.hpp"

namespace twhe {

struct PoissonOptions {
  double tol = 1e-11;          // relative residual target
  double solvability_tol = 1e-9;  // relative size of the kernel component allowed in f
  int max_iters = 400;
};

// Solves sqrt(-1) Lambda dbar d phi = f with integral(phi vol) = 0.
//
// For metrics e^{psi} * base the discrete operator is e^{-psi} W0 with W0
// diagonal in Fourier space, so the solve is exact: the solvability
// condition is that e^{psi} f has no component on the kernel of W0 (the
// constant mode, plus the alternating modes of the centered stencils). For
// n = 1 this is integral(f vol) = 0. Pointwise metrics use BiCGSTAB with the
// constant-metric inverse as preconditioner.
RealField poisson_solve(const RealField& f, const TorusGeometry& geom, const PoissonOptions& opt = {});

}  // namespace twhe
