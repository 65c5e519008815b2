#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "twhe/bundle.hpp"
#include "twhe/fields.hpp"

namespace twhe {

// Hermitian metric on a twisted bundle: one Gram-matrix field per chart,
// meaningful on that chart's band, times an optional global conformal
// factor e^{phi}. Keeping the factor separate makes conformal changes of the
// background exact at the discrete level.
class MetricField {
 public:
  MetricField() = default;
  MetricField(CoverPtr cover, int rank);

  const CoverPtr& cover() const { return cover_; }
  const GridPtr& grid() const { return cover_->grid(); }
  int rank() const { return rank_; }
  int num_charts() const { return static_cast<int>(charts_.size()); }

  // Full metric including the conformal factor.
  CMat at(int chart, std::size_t idx) const;
  // Metric in the chart of record.
  CMat at(std::size_t idx) const { return at(cover_->chart_of_record(idx), idx); }
  // Metric without the conformal factor.
  MatrixField::ConstMap base_at(int chart, std::size_t idx) const { return charts_[chart].at(idx); }
  void set_base(int chart, std::size_t idx, const CMat& g) { charts_[chart].at(idx) = g; }

  const RealField* conformal_log() const { return log_ ? &*log_ : nullptr; }
  double conformal_weight(std::size_t idx) const { return log_ ? std::exp((*log_)[idx]) : 1.0; }
  // Returns a copy with the metric multiplied by e^{phi}.
  MetricField conformally_scaled(const RealField& phi) const;

  std::string id = "metric";

 private:
  CoverPtr cover_;
  int rank_ = 0;
  std::vector<EndoField> charts_;
  std::optional<RealField> log_;
};

using SeedFn = std::function<CMat(int chart, std::size_t idx)>;

// G_i = sum_j rho_j phi_ij^dagger S_j phi_ij, compatible with the
// transitions by construction. Seeds must be positive (NumericError).
MetricField build_compatible_metric(const TwistedBundle& E, const SeedFn& seed);

// Closed-form metric published by the bundle builder.
MetricField reference_metric(const TwistedBundle& E);

// sup over overlaps of |G_i - phi_ij^dagger G_j phi_ij| / |G_i|.
double metric_compatibility_defect(const MetricField& H, const TwistedBundle& E);

}  // namespace twhe
