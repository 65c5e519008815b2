#pragma once

#include <Eigen/Dense>
#include <complex>

#include "twhe/conventions.hpp"

namespace twhe {

using cd = std::complex<double>;
inline constexpr cd kI{0.0, 1.0};

// Small complex matrix with inline storage; bundle ranks and complex
// dimensions never exceed kMaxRank.
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRank, kMaxRank>;
using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxRank, 1>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRank, 1>;

// Eigen-decomposition of an endomorphism that is self-adjoint for the Gram
// matrix G. Eigenvalues ascending; the columns of `frame` are G-orthonormal
// and `inverse_frame` = frame^{-1} = frame^dagger G.
struct SelfAdjointEigen {
  RVec values;
  CMat frame;
  CMat inverse_frame;
};

// Hermitian eigen-decomposition, closed form for size <= 2.
void hermitian_eigen(const CMat& m, RVec& values, CMat& vectors);

// s must be G-self-adjoint up to rounding; its Hermitian part in a
// G-orthonormal frame is used.
SelfAdjointEigen selfadjoint_eigen(const CMat& s, const CMat& gram);

// Lower Cholesky factor L with G = L L^dagger. Throws NumericError when G is
// not positive above the floor.
CMat cholesky_lower(const CMat& gram);

// Checks positivity of a Hermitian Gram matrix relative to its largest
// eigenvalue. Returns the smallest eigenvalue.
double check_positive(const CMat& gram, const char* what);

// Adjoint of f with respect to G: G^{-1} f^dagger G.
CMat adjoint(const CMat& f, const CMat& gram);
// (f + f^*) / 2.
CMat symmetrize(const CMat& f, const CMat& gram);

// |f|_G = sqrt(tr(f f^*)).
double endo_norm(const CMat& f, const CMat& gram);
// <f, g>_G = tr(f g^*).
cd endo_inner(const CMat& f, const CMat& g, const CMat& gram);

CMat identity(int r);

}  // namespace twhe
