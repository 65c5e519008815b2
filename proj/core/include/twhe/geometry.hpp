#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twhe/fields.hpp"

namespace twhe {

// Hermitian metric g on the torus (see conventions.hpp for how it encodes
// omega). Either e^{psi} * base with base constant, or given pointwise.
class TorusGeometry {
 public:
  static TorusGeometry flat(GridPtr grid, std::optional<CMat> base = std::nullopt);
  static TorusGeometry conformal(RealField log_factor, std::optional<CMat> base = std::nullopt);
  static TorusGeometry pointwise(GridPtr grid, std::vector<CMat> metric);

  const GridPtr& grid() const { return grid_; }
  int complex_dim() const { return grid_->complex_dim(); }

  CMat metric(std::size_t idx) const;
  CMat inverse(std::size_t idx) const;
  double volume_density(std::size_t idx) const;
  double volume() const;

  // e^{psi} base form; conformal_log() is null for flat geometries.
  bool conformally_constant() const { return pointwise_.empty(); }
  const RealField* conformal_log() const { return log_factor_ ? &*log_factor_ : nullptr; }
  const CMat& base() const { return base_; }
  double conformal_weight(std::size_t idx) const {
    return log_factor_ ? std::exp((*log_factor_)[idx]) : 1.0;
  }

  std::string id = "flat";

 private:
  GridPtr grid_;
  CMat base_;
  CMat base_inv_;
  double base_det_ = 1.0;
  std::optional<RealField> log_factor_;
  std::vector<CMat> pointwise_;
};

// tr(g^{-1} f) pointwise.
ComplexField contract_lambda(const Form11Field& f, const TorusGeometry& geom);

double integrate(const RealField& f, const TorusGeometry& geom);
cd integrate(const ComplexField& f, const TorusGeometry& geom);

// sup of the top-degree coefficient of dd^c(omega^{n-1}); zero for n = 1.
double gauduchon_defect(const TorusGeometry& geom);
// sup of dd^c(omega^{n-2}); identically zero for n <= 2.
double astheno_defect(const TorusGeometry& geom);

// Scalar finite-difference derivatives of complex data on the grid.
// D_axis, d/dz_a = (D_x - i D_y)/2, d/dzbar_a = (D_x + i D_y)/2.
void diff_axis(const Grid& g, const cd* in, cd* out, int axis, std::size_t stride = 1);
std::vector<cd> d_z(const Grid& g, const std::vector<cd>& f, int a);
std::vector<cd> d_zbar(const Grid& g, const std::vector<cd>& f, int a);

// sqrt(-1) Lambda dbar d u = -2 g^{ba} dbar_b d_a u, composed from the first
// derivative stencils.
RealField ddbar_lambda(const RealField& u, const TorusGeometry& geom);

}  // namespace twhe
