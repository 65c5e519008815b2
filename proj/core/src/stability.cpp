#include "twhe/stability.hpp"

#include <algorithm>
#include <cmath>

#include "twhe/chern.hpp"
#include "twhe/errors.hpp"
#include "twhe/spectral.hpp"

namespace twhe {

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

double weak_holomorphic_defect(const EndoField& pi, const MetricField& K, const GaugeContext& ctx) {
  const EndForm01 d = d01(pi, ctx);
  const int n = pi.grid()->complex_dim();
  const int r = pi.rank();
  double m = 0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    const CMat comp = identity(r) - pi.get(x);
    const CMat g = K.at(x);
    for (int a = 0; a < n; ++a) m = std::max(m, endo_norm(comp * d.get(x, a), g));
  }
  return m;
}

}  // namespace

CandidateDefects candidate_defects(const SubbundleCandidate& c, const MetricField& K, const TwistedBundle& E) {
  CandidateDefects out;
  const EndoField& pi = c.projector;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    const CMat p = pi.get(x);
    const CMat g = K.at(x);
    out.idempotent = std::max(out.idempotent, (p * p - p).norm());
    out.selfadjoint = std::max(out.selfadjoint, (p - adjoint(p, g)).norm());
    out.rank = std::max(out.rank, std::abs(p.trace() - cd(c.declared_rank)));
  }
  out.weak_holomorphic = weak_holomorphic_defect(pi, K, GaugeContext(E));
  return out;
}

SubbundleCandidate candidate_from_inclusion(const MetricField& K, const std::function<CMat(std::size_t)>& columns,
                                            std::string label) {
  SubbundleCandidate out;
  out.label = std::move(label);
  out.projector = EndoField(K.grid(), K.rank());
  for (std::size_t x = 0; x < out.projector.size(); ++x) {
    const CMat c = columns(x);
    if (c.rows() != K.rank()) throw ShapeError("inclusion has the wrong number of rows");
    const CMat g = K.at(x);
    const CMat gram = c.adjoint() * g * c;
    out.projector.at(x) = c * gram.inverse() * c.adjoint() * g;
    out.declared_rank = static_cast<int>(c.cols());
  }
  return out;
}

SubbundleCandidate factor_candidate(const MetricField& K, const TwistedBundle& E, int block) {
  const auto& blocks = E.blocks();
  if (block < 0 || block >= static_cast<int>(blocks.size()))
    throw DomainError("bundle " + E.id() + " has no summand " + std::to_string(block));
  const auto b = blocks[block];
  const int r = E.rank();
  return candidate_from_inclusion(
      K,
      [&](std::size_t) {
        CMat c = CMat::Zero(r, b.rank);
        for (int k = 0; k < b.rank; ++k) c(b.offset + k, k) = 1.0;
        return c;
      },
      "summand:" + std::to_string(block) + ":" + b.id);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kStable: return "stable-against-list";
    case Verdict::kSemistable: return "semistable-against-list";
    case Verdict::kDestabilized: return "destabilized";
  }
  return "unknown";
}

StabilityVerdict verdict_against(const std::vector<SubbundleCandidate>& candidates, const MetricField& K,
                                 const TwistedBundle& E, const TorusGeometry& geom, double tol,
                                 double projector_tol) {
  StabilityVerdict out;
  const int r = E.rank();
  out.bundle_slope = degree(K, E, geom) / r;
  const EndoField lf = lambda_F(K, E, geom);
  bool all_stable = true, any_destab = false;
  for (const auto& c : candidates) {
    const CandidateDefects d = candidate_defects(c, K, E);
    const double algebraic = std::max({d.idempotent, d.selfadjoint, d.rank});
    if (algebraic > projector_tol)
      throw DomainError("candidate '" + c.label + "' is not a K-orthogonal projector of rank " +
                        std::to_string(c.declared_rank) + " (defect " + std::to_string(algebraic) + ")");
    if (c.declared_rank <= 0 || c.declared_rank >= r) continue;
    CandidateSlope cs;
    cs.label = c.label;
    cs.rank = c.declared_rank;
    cs.degree = degree_via_projection(c.projector, lf, K, E, geom);
    cs.slope = cs.degree / cs.rank;
    cs.margin = out.bundle_slope - cs.slope;
    if (cs.margin < -tol) any_destab = true;
    if (!(cs.margin > tol)) all_stable = false;
    out.candidates.push_back(cs);
  }
  out.verdict = any_destab ? Verdict::kDestabilized : all_stable ? Verdict::kStable : Verdict::kSemistable;
  return out;
}

double principal_angle(const EndoField& P, const EndoField& Q, const MetricField& K) {
  const int r = P.rank();
  double worst = 0;
  for (std::size_t x = 0; x < P.size(); ++x) {
    const CMat ldag = cholesky_lower(K.at(x)).adjoint();
    const CMat li = ldag.inverse();
    const CMat p = ldag * P.get(x) * li;
    const CMat q = ldag * Q.get(x) * li;
    const CMat id = identity(r);
    for (const CMat& m : {CMat((id - q) * p), CMat((id - p) * q)}) {
      RVec ev;
      CMat vec;
      hermitian_eigen(m.adjoint() * m, ev, vec);
      const double sigma = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
      worst = std::max(worst, std::asin(std::min(1.0, sigma)));
    }
  }
  return worst;
}

ProbeReport uy_probe(const EndoField& s, const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom,
                     const ProbeOptions& opt, const EndoField* reference) {
  ProbeReport out;
  const int r = s.rank();
  const std::size_t npts = s.size();
  RealField dens(s.grid());
  for (std::size_t x = 0; x < npts; ++x) dens[x] = endo_inner(s.get(x), s.get(x), K.at(x)).real();
  out.l2_norm = std::sqrt(integrate(dens, geom));
  out.bundle_degree = degree(K, E, geom);
  if (out.l2_norm < opt.min_l2_norm) {
    out.reason = "no blow-up: |s|_L2 below threshold";
    return out;
  }

  // Eigen-decomposition of u = s / |s|_L2.
  std::vector<SelfAdjointEigen> eig(npts);
  std::vector<double> all;
  all.reserve(npts * r);
  for (std::size_t x = 0; x < npts; ++x) {
    eig[x] = selfadjoint_eigen(s.get(x) / out.l2_norm, K.at(x));
    for (int j = 0; j < r; ++j) all.push_back(eig[x].values(j));
  }
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  if (!(range > 1e-12)) {
    out.reason = "no spectral gap";
    return out;
  }
  std::vector<double> cuts;  // upper bounds of clusters (exclusive of the last)
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] > opt.gap_fraction * range) cuts.push_back(0.5 * (sorted[i] + sorted[i - 1]));
  if (cuts.empty()) {
    out.reason = "no spectral gap";
    return out;
  }
  const int l = static_cast<int>(cuts.size()) + 1;
  auto cluster_of = [&](double v) {
    int c = 0;
    while (c < l - 1 && v > cuts[c]) ++c;
    return c;
  };
  // Each eigenvalue slot must stay in one cluster over the grid.
  std::vector<int> slot_cluster(r);
  for (int j = 0; j < r; ++j) slot_cluster[j] = cluster_of(eig[0].values(j));
  out.levels.assign(l, {});
  std::vector<double> sum(l, 0), sum2(l, 0);
  std::vector<std::size_t> cnt(l, 0);
  std::vector<double> lo(l, 1e300), hi(l, -1e300);
  for (std::size_t x = 0; x < npts; ++x)
    for (int j = 0; j < r; ++j) {
      const double v = eig[x].values(j);
      const int c = cluster_of(v);
      if (c != slot_cluster[j]) {
        out.reason = "eigenvalue clusters cross between points";
        return out;
      }
      sum[c] += v;
      sum2[c] += v * v;
      ++cnt[c];
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
  for (int c = 0; c < l; ++c) {
    ProbeLevel& lv = out.levels[c];
    lv.value = sum[c] / cnt[c];
    lv.stddev = std::sqrt(std::max(0.0, sum2[c] / cnt[c] - lv.value * lv.value));
    lv.min = lo[c];
    lv.max = hi[c];
    lv.multiplicity = static_cast<int>(cnt[c] / npts);
  }
  double min_gap = 1e300, max_std = 0;
  for (int c = 0; c < l; ++c) {
    max_std = std::max(max_std, out.levels[c].stddev);
    if (c + 1 < l) min_gap = std::min(min_gap, out.levels[c + 1].value - out.levels[c].value);
  }
  out.constancy_ratio = max_std / min_gap;

  const GaugeContext ctx(E);
  const EndoField lf = lambda_F(K, E, geom);
  const double mu = out.bundle_degree / r;
  int rank_acc = 0;
  for (int j = 0; j + 1 < l; ++j) {
    // Smoothed step: 1 up to cluster j, 0 from cluster j + 1, cubic over
    // the middle half of the gap.
    const double a = out.levels[j].max;
    const double b = out.levels[j + 1].min;
    const double lo_edge = a + 0.25 * (b - a);
    const double width = 0.5 * (b - a);
    const auto P = [&](double v) { return 1.0 - smoothstep((v - lo_edge) / width); };
    ProbeProjector pj;
    pj.projector = EndoField(s.grid(), r);
    for (std::size_t x = 0; x < npts; ++x) pj.projector.at(x) = spectral_function(eig[x], P);
    rank_acc += out.levels[j].multiplicity;
    pj.rank = rank_acc;
    pj.degree = degree_via_projection(pj.projector, lf, K, E, geom);
    pj.margin = mu - pj.degree / pj.rank;
    pj.weak_holomorphic = weak_holomorphic_defect(pj.projector, K, ctx);
    for (std::size_t x = 0; x < npts; ++x) {
      const CMat p = pj.projector.get(x);
      pj.projector_defect = std::max(pj.projector_defect, (p * p - p).norm());
    }
    if (reference && j == 0) pj.principal_angle = principal_angle(pj.projector, *reference, K);
    out.projectors.push_back(std::move(pj));
  }

  out.nu_weighted = out.levels[l - 1].value * out.bundle_degree;
  for (int j = 0; j + 1 < l; ++j) {
    const double step = out.levels[j + 1].value - out.levels[j].value;
    out.nu_weighted -= step * out.projectors[j].degree;
    out.nu_margins += step * out.projectors[j].rank * out.projectors[j].margin;
  }
  out.destabilizing = out.nu_weighted < -opt.tol;
  out.conclusive = true;
  return out;
}

}  // namespace twhe
