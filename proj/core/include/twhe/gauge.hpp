#pragma once

#include <cstdint>
#include <vector>

#include "twhe/bundle.hpp"
#include "twhe/fields.hpp"
#include "twhe/geometry.hpp"

namespace twhe {

// Global sections of End(E) and End(E)-valued forms are stored pointwise in
// the gauge of the point's chart of record. Finite differences at x need
// neighbour values re-expressed in the gauge of x's chart; this table holds
// the transition for every stencil neighbour that lies in another chart.
class GaugeContext {
 public:
  explicit GaugeContext(const TwistedBundle& E, int radius = 2);

  const TwistedBundle& bundle() const { return *E_; }
  const GridPtr& grid() const { return E_->grid(); }
  int rank() const { return E_->rank(); }

  // Value of component `comp` of f at x + step * e_axis, in x's gauge.
  CMat neighbor(const MatrixField& f, int comp, std::size_t x, int axis, int step) const;
  // The transition g with value_x = g value_x' g^{-1}; identity if same chart.
  bool crosses(std::size_t x, int axis, int step) const { return slot(x, axis, step) >= 0; }
  CMat transport(std::size_t x, int axis, int step) const;

 private:
  std::int32_t slot(std::size_t x, int axis, int step) const {
    const int k = step < 0 ? step + radius_ : step + radius_ - 1;
    return slots_[(x * dims_ + axis) * (2 * radius_) + k];
  }
  std::shared_ptr<const TwistedBundle> E_;
  int radius_;
  int dims_;
  std::vector<std::int32_t> slots_;
  std::vector<cd> mats_;  // pairs (g, g^{-1}), r*r each
};

// d_a s and dbar_b s of a section of End(E) (no connection term).
EndForm10 d10(const EndoField& s, const GaugeContext& ctx);
EndForm01 d01(const EndoField& s, const GaugeContext& ctx);
// d_K s = d s + [A, s] with A the Chern connection in chart-of-record gauge.
EndForm10 covariant_d10(const EndoField& s, const EndForm10& A, const GaugeContext& ctx);
// dbar of an End(E)-valued (1,0)-form, as stored (1,1) coefficients
// f_ab = 2i dbar_b Y_a.
EndForm11 dbar_form10(const EndForm10& Y, const GaugeContext& ctx);
// sqrt(-1) Lambda of an End(E)-valued (1,1)-form: i g^{ba} f_ab.
EndoField sqrt_lambda(const EndForm11& F, const TorusGeometry& geom);

}  // namespace twhe
