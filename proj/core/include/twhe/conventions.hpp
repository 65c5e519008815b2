#pragma once

// Every normalization the library relies on lives here so that changing one
// of them is a one-line edit.
//
// Coordinates. A grid point has real coordinates (x1, y1, x2, y2, ...) with
// z_a = x_a + i y_a. Real axis 2a is x_a, axis 2a+1 is y_a.
//
// (1,1)-forms. A (1,1)-form is stored through its coefficient matrix f with
//     form = (i/2) sum_{a,b} f_{ab} dz^a ^ dzbar^b,
// so a Kaehler form corresponds to its metric matrix g and
// Lambda(form) = tr(g^{-1} f), Lambda(omega) = n.
// Volume form omega^n/n! = det(g) dx1 dy1 ... dxn dyn.
//
// Hermitian metrics on bundles are stored as Gram matrices G:
//     <v, w> = w^dagger G v,
// transitions act on fibre coordinates as v_j = phi_ij v_i, so
//     G_i = phi_ij^dagger G_j phi_ij,
// endomorphisms glue as f_j = phi_ij f_i phi_ij^{-1}. The Chern connection is
// A = G^{-1} dG (type (1,0)), the adjoint of f is G^{-1} f^dagger G, and
// curvature coefficients are f_{ab} = 2i dbar_b A_a - B_{ab} Id.
// With this choice sqrt(-1) Lambda F = -2 g^{ba} dbar_b A_a and
// sqrt(-1) Lambda dbar d u = -(1/2) Laplacian(u) for the flat unit metric.

#include <numbers>

namespace twhe {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sqrt(-1) Lambda dbar d = kDdbarToLaplacian * Laplacian on flat tori.
inline constexpr double kDdbarToLaplacian = -0.5;

// deg(E) = (1 / kChernNormalization) * integral tr(sqrt(-1) Lambda F) vol.
inline constexpr double kChernNormalization = kTwoPi;

// Norm of an endomorphism-valued (0,1)-form: |a|^2 = 2 g^{ba} tr(a_b a_a^*),
// the factor matching sqrt(-1) Lambda (du ^ dbar u) = 2 |u_z|^2.
inline constexpr double kForm01NormFactor = 2.0;

// Finite difference order used for every first derivative.
enum class FdOrder { kSecond = 2, kFourth = 4 };
inline constexpr FdOrder kDefaultFdOrder = FdOrder::kFourth;

// Tolerances.
inline constexpr double kAlgebraicTol = 1e-10;
inline constexpr double kDifferentialFactor = 10.0;
inline double differential_tol(double h) { return kDifferentialFactor * h * h; }

// Eigenvalues below this floor make a metric or h non-positive.
inline constexpr double kPositivityFloor = 1e-12;
// Eigenvalue gaps below this use the divided-difference limit of a kernel.
inline constexpr double kDegenerateGap = 1e-8;

// Default grid resolutions.
inline constexpr int kDefaultResolution1 = 64;
inline constexpr int kDefaultResolution2 = 32;

// Width of a chart overlap as a fraction of the period along a banded axis.
inline constexpr double kOverlapFraction = 0.125;

inline constexpr int kMaxRank = 4;

}  // namespace twhe
