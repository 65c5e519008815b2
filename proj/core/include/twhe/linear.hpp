#pragma once

#include <Eigen/Dense>
#include <functional>

#include "twhe/geometry.hpp"

namespace twhe {

// y = A x for a matrix-free real linear map.
using LinearMap = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct KrylovOptions {
  double tol = 1e-8;  // relative to |M^{-1} b|
  int max_iters = 300;
  int restart = 60;
};

struct KrylovResult {
  int iterations = 0;
  double error = 0;
  bool converged = false;
};

// Restarted GMRES for A x = b with preconditioner M^{-1}; x is the initial
// guess on entry.
KrylovResult gmres_solve(const LinearMap& A, const LinearMap& precond, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x, const KrylovOptions& opt = {});

// (sqrt(-1) Lambda dbar d + eps)^{-1} applied to each of `components`
// interleaved real fields, diagonalized by FFT with the exact symbol of the
// finite-difference operator for the mean metric.
class HelmholtzPreconditioner {
 public:
  HelmholtzPreconditioner(const TorusGeometry& geom, int components, double eps);
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  LinearMap map() const;

 private:
  GridPtr grid_;
  int components_;
  std::vector<double> inverse_symbol_;
};

}  // namespace twhe
