#pragma once

#include <functional>

#include "twhe/fields.hpp"
#include "twhe/linalg.hpp"
#include "twhe/metric.hpp"

namespace twhe {

// Two-variable kernel applied entrywise in an eigenframe. `diagonal(x)` is
// the limit value Psi(x, x), used when |x - y| < kDegenerateGap.
struct Kernel {
  std::function<double(double, double)> value;
  std::function<double(double)> diagonal;
  double operator()(double x, double y) const;
};

// Psi(x, y) = (e^{y - x} - 1) / (y - x), Psi(x, x) = 1. With h = e^s,
// h^{-1} d_K h = psi_apply(s, d_K s, dexp_kernel()).
Kernel dexp_kernel();

// Entry (j, k) of the result, in the G-orthonormal eigenframe of s, is
// Psi(lambda_j, lambda_k) * A_jk. Eigenvalues ascending.
CMat psi_apply(const SelfAdjointEigen& es, const CMat& A, const Kernel& psi);
CMat psi_apply(const CMat& s, const CMat& A, const Kernel& psi, const CMat& gram);
// Entries that are exactly zero in the frame stay zero even if the kernel
// overflows.

// Single-variable functional calculus f(s).
CMat spectral_function(const SelfAdjointEigen& es, const std::function<double(double)>& f);

CMat endo_exp(const CMat& s, const CMat& gram);
// Throws NumericError if h has an eigenvalue below the positivity floor or
// is not G-self-adjoint.
CMat endo_log(const CMat& h, const CMat& gram);

// Field versions; the metric supplies the Gram matrix in each point's
// chart of record.
EndoField endo_exp(const EndoField& s, const MetricField& K);
EndoField endo_log(const EndoField& h, const MetricField& K);
MatrixField psi_apply(const EndoField& s, const MatrixField& A, const Kernel& psi, const MetricField& K);

}  // namespace twhe
