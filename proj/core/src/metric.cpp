#include "twhe/metric.hpp"

#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

MetricField::MetricField(CoverPtr cover, int rank) : cover_(std::move(cover)), rank_(rank) {
  charts_.reserve(cover_->num_charts());
  for (int c = 0; c < cover_->num_charts(); ++c) charts_.emplace_back(cover_->grid(), rank_);
}

CMat MetricField::at(int chart, std::size_t idx) const {
  CMat g = charts_[chart].at(idx);
  if (log_) g *= std::exp((*log_)[idx]);
  return g;
}

MetricField MetricField::conformally_scaled(const RealField& phi) const {
  require_same_grid(*phi.grid(), *grid(), "conformally_scaled");
  MetricField out = *this;
  if (!out.log_) out.log_ = RealField(grid());
  for (std::size_t i = 0; i < phi.size(); ++i) (*out.log_)[i] += phi[i];
  return out;
}

MetricField build_compatible_metric(const TwistedBundle& E, const SeedFn& seed) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int nc = cover.num_charts();
  MetricField H(E.cover(), E.rank());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    std::vector<CMat> seeds(nc);
    std::vector<double> rho(nc, 0.0);
    for (int j = 0; j < nc; ++j) {
      if (!cover.contains(j, idx)) continue;
      rho[j] = cover.partition(j, idx);
      if (rho[j] <= 0) continue;
      seeds[j] = seed(j, idx);
      if (seeds[j].rows() != E.rank()) throw ShapeError("seed metric has the wrong rank");
      check_positive(seeds[j], "seed metric");
    }
    for (int i = 0; i < nc; ++i) {
      if (!cover.contains(i, idx)) continue;
      CMat acc = CMat::Zero(E.rank(), E.rank());
      for (int j = 0; j < nc; ++j) {
        if (rho[j] <= 0) continue;
        const CMat phi = E.transition(i, j, idx);
        acc += rho[j] * (phi.adjoint() * seeds[j] * phi);
      }
      acc = 0.5 * (acc + acc.adjoint());
      H.set_base(i, idx, acc);
    }
  }
  H.id = "averaged";
  return H;
}

MetricField reference_metric(const TwistedBundle& E) {
  if (!E.reference_metric()) throw DomainError("bundle " + E.id() + " has no closed-form metric");
  const ChartCover& cover = *E.cover();
  MetricField H(E.cover(), E.rank());
  for (std::size_t idx = 0; idx < cover.grid()->size(); ++idx)
    for (int c = 0; c < cover.num_charts(); ++c)
      if (cover.contains(c, idx)) H.set_base(c, idx, E.reference_metric()(c, idx));
  H.id = "reference";
  return H;
}

double metric_compatibility_defect(const MetricField& H, const TwistedBundle& E) {
  const ChartCover& cover = *E.cover();
  const int nc = cover.num_charts();
  double m = 0;
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (std::size_t idx : cover.intersection({i, j})) {
        const CMat gi = H.base_at(i, idx);
        const CMat gj = H.base_at(j, idx);
        const CMat phi = E.transition(i, j, idx);
        m = std::max(m, (gi - phi.adjoint() * gj * phi).norm() / gi.norm());
      }
  return m;
}

}  // namespace twhe
