#pragma once

#include "twhe/connection.hpp"

namespace twhe {

// c1 = (i / 2 pi) tr F as a stored (1,1)-form.
Form11Field c1_form(const MetricField& H, const TwistedBundle& E);

// Top-degree density of c2 = -(1/8 pi^2) (tr F ^ tr F - tr(F ^ F)) relative
// to omega^2/2. n = 2 only.
RealField c2_density(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom);

// (a ^ b) / (omega^2 / 2) for stored (1,1) coefficients at a point, n = 2.
// For End-valued forms the matrix product a * b is traced by the caller.
CMat wedge_density(const EndForm11& a, const EndForm11& b, std::size_t idx, const CMat& g);

double degree(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom);
double slope(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom);

// Degree of the (weakly holomorphic) subsheaf with H-orthogonal projector pi:
// (1/2pi) integral( tr(pi sqrt(-1) Lambda F_H) - |dbar pi|^2 ) vol.
// pi is given in chart-of-record gauge.
double degree_via_projection(const EndoField& pi, const MetricField& H, const TwistedBundle& E,
                             const TorusGeometry& geom);
// Same, with the curvature term supplied (sqrt(-1) Lambda F in chart-of-record gauge).
double degree_via_projection(const EndoField& pi, const EndoField& lambdaF, const MetricField& H,
                             const TwistedBundle& E, const TorusGeometry& geom);

// |a|^2 = 2 g^{ba} tr(a_a^* a_b) for an End-valued (0,1)-form at a point.
double form01_norm2(const EndForm01& a, std::size_t idx, const CMat& ginv, const CMat& gram);

// integral (2 c2 - (r-1)/r c1^2), n = 2.
double bogomolov_number(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom);

struct BogomolovDecomposition {
  double lhs = 0;  // (1/4pi^2) integral tr(F_perp ^ F_perp)
  double rhs = 0;  // (1/4pi^2) integral (|F_perp|^2 - |sqrt(-1) Lambda F_perp|^2) vol
  double defect() const { return std::abs(lhs - rhs); }
};
BogomolovDecomposition bogomolov_decomposition(const MetricField& H, const TwistedBundle& E,
                                               const TorusGeometry& geom);

// Compares sup e^{phi} |sqrt(-1) Lambda_omega F_perp|_H, computed through the
// rescaled metric omega~ = e^{-phi} omega, against
// e^{sup phi} sup |sqrt(-1) Lambda_omega F - lambda Id|_H with
// lambda = 2 pi deg_omega(E) / (r Vol_omega).
struct ConformalBound {
  double lhs = 0;
  double rhs = 0;
  double lambda = 0;
};
ConformalBound conformal_residual_bound_check(const MetricField& H, const TwistedBundle& E,
                                              const TorusGeometry& geom, const RealField& phi);

// Pointwise H-norm of an End-valued (1,1)-form.
double form11_norm2(const EndForm11& F, std::size_t idx, const CMat& ginv, const CMat& gram);

}  // namespace twhe
