#include "twhe/bundle.hpp"

#include <cmath>
#include <memory>

#include "twhe/errors.hpp"

namespace twhe {

TwistedBundle::TwistedBundle(int rank, TwistPtr twist, TransitionFn fn, std::string id)
    : rank_(rank), twist_(std::move(twist)), fn_(std::move(fn)), id_(std::move(id)) {
  if (rank_ < 1 || rank_ > kMaxRank) throw ShapeError("bundle rank out of range");
  blocks_ = {{0, rank_, id_}};
}

CMat TwistedBundle::transition(int from, int to, std::size_t idx) const {
  if (from == to) return identity(rank_);
  return fn_(from, to, idx);
}

TwistedBundle TwistedBundle::with_modified_transition(int i, int j,
                                                      std::function<cd(std::size_t)> factor) const {
  TwistedBundle out = *this;
  auto base = fn_;
  out.fn_ = [base, i, j, factor](int from, int to, std::size_t idx) {
    CMat m = base(from, to, idx);
    if (from == i && to == j) m *= factor(idx);
    if (from == j && to == i) m /= factor(idx);
    return m;
  };
  out.id_ = id_ + "+fault";
  out.reference_ = nullptr;
  return out;
}

namespace {

bool has_axis(const ChartCover& c, int axis, int& k_out) {
  const auto& ax = c.banded_axes();
  for (std::size_t k = 0; k < ax.size(); ++k)
    if (ax[k] == axis) {
      k_out = static_cast<int>(k);
      return true;
    }
  return false;
}

}  // namespace

namespace {

// Identity (or theta) transitions satisfy the cocycle condition exactly when
// alpha = 1; B and beta only enter the connection.
bool alpha_trivial(const TwistData& t) {
  for (const auto& [key, a] : t.alpha)
    for (std::size_t x = 0; x < a.size(); ++x)
      if (std::abs(a[x] - 1.0) > kAlgebraicTol) return false;
  return true;
}

}  // namespace

TwistedBundle build_trivial_bundle(TwistPtr twist, int rank) {
  if (!alpha_trivial(*twist)) throw DomainError("trivial bundle needs alpha = 1, got twist " + twist->id);
  TwistedBundle E(
      rank, twist, [rank](int, int, std::size_t) { return identity(rank); },
      "trivial:" + std::to_string(rank));
  E.set_reference_metric([rank](int, std::size_t) { return identity(rank); });
  return E;
}

TwistedBundle build_clock_shift_bundle(TwistPtr twist, int r) {
  if (twist->id != "clock-shift:" + std::to_string(r))
    throw DomainError("clock-shift bundle of rank " + std::to_string(r) +
                      " needs the matching clock-shift twist, got " + twist->id);
  const ChartCover& cover = *twist->cover;
  std::vector<CMat> wrap(cover.banded_axes().size(), identity(r));
  wrap[0] = clock_matrix(r);
  wrap[1] = shift_matrix(r);
  CoverPtr cp = twist->cover;
  TwistedBundle E(
      r, twist,
      [cp, wrap](int from, int to, std::size_t idx) {
        return constant_transition(*cp, wrap, from, to, idx);
      },
      "clock-shift:" + std::to_string(r));
  E.set_reference_metric([r](int, std::size_t) { return identity(r); });
  return E;
}

TwistedBundle build_theta_bundle(TwistPtr twist, int d1, int d2) {
  if (!alpha_trivial(*twist)) throw DomainError("theta bundle needs alpha = 1, got twist " + twist->id);
  CoverPtr cp = twist->cover;
  const Grid& g = *cp->grid();
  if (d2 != 0 && g.complex_dim() < 2) throw UnsupportedDimensionError("d2 needs n = 2");
  const std::array<int, 2> deg{d1, d2};
  // Banded-axis index of y_a for each complex direction with nonzero degree.
  std::array<int, 2> kk{-1, -1};
  for (int a = 0; a < g.complex_dim(); ++a) {
    if (deg[a] == 0) continue;
    if (!has_axis(*cp, 2 * a + 1, kk[a]))
      throw DomainError("theta bundle needs a cover banded along y" + std::to_string(a + 1));
  }
  auto fn = [cp, deg, kk](int from, int to, std::size_t idx) {
    const ChartCover& c = *cp;
    const auto x0 = c.band0_coords(idx);
    cd phi = 1.0;
    for (int a = 0; a < 2; ++a) {
      if (kk[a] < 0) continue;
      const int bf = c.band(from, kk[a]);
      const int bt = c.band(to, kk[a]);
      if (bf == bt) continue;
      const auto seam = c.seam(kk[a], idx);
      if (seam == ChartCover::Seam::kNone) throw DomainError("transition evaluated outside the overlap");
      if (seam == ChartCover::Seam::kMid) continue;
      // Band 0 -> band 1 across the wrap seam: e^{pi d - 2 pi i d z}, z lifted into band 0.
      const cd z(x0[2 * a] / c.grid()->period(2 * a), x0[2 * a + 1] / c.grid()->period(2 * a + 1));
      const cd f = std::exp(kPi * deg[a] - kTwoPi * kI * static_cast<double>(deg[a]) * z);
      phi *= bf == 0 ? f : 1.0 / f;
    }
    CMat m(1, 1);
    m(0, 0) = phi;
    return m;
  };
  std::string id = "theta:" + std::to_string(d1);
  if (g.complex_dim() == 2) id = "line:" + std::to_string(d1) + "," + std::to_string(d2);
  TwistedBundle E(1, twist, fn, id);
  E.set_reference_metric([cp, deg, kk](int chart, std::size_t idx) {
    const auto x = cp->lifted_coords(chart, idx);
    double e = 0;
    for (int a = 0; a < 2; ++a) {
      if (kk[a] < 0) continue;
      const double y = x[2 * a + 1] / cp->grid()->period(2 * a + 1);
      e += -kTwoPi * deg[a] * y * y;
    }
    CMat m(1, 1);
    m(0, 0) = std::exp(e);
    return m;
  });
  return E;
}

TwistedBundle direct_sum(const std::vector<TwistedBundle>& parts) {
  if (parts.empty()) throw ShapeError("direct sum of no bundles");
  int rank = 0;
  std::string id = "sum:[";
  std::vector<TwistedBundle::Block> blocks;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!parts[p].twist()->same_as(*parts[0].twist()))
      throw ConfigError("direct sum of bundles with different twists (" + parts[0].twist()->id +
                        " vs " + parts[p].twist()->id + ")");
    blocks.push_back({rank, parts[p].rank(), parts[p].id()});
    rank += parts[p].rank();
    id += (p ? "," : "") + parts[p].id();
  }
  id += "]";
  if (rank > kMaxRank) throw ShapeError("direct sum rank exceeds the supported maximum");
  auto shared = std::make_shared<std::vector<TwistedBundle>>(parts);
  auto fn = [shared, rank](int from, int to, std::size_t idx) {
    CMat m = CMat::Zero(rank, rank);
    int off = 0;
    for (const auto& p : *shared) {
      m.block(off, off, p.rank(), p.rank()) = p.transition(from, to, idx);
      off += p.rank();
    }
    return m;
  };
  TwistedBundle E(rank, parts[0].twist(), fn, id);
  bool all_ref = true;
  for (const auto& p : parts) all_ref = all_ref && bool(p.reference_metric());
  if (all_ref)
    E.set_reference_metric([shared, rank](int chart, std::size_t idx) {
      CMat m = CMat::Zero(rank, rank);
      int off = 0;
      for (const auto& p : *shared) {
        m.block(off, off, p.rank(), p.rank()) = p.reference_metric()(chart, idx);
        off += p.rank();
      }
      return m;
    });
  E.set_blocks(std::move(blocks));
  return E;
}

ValidationReport validate_bundle(const TwistedBundle& E) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int nc = cover.num_charts();
  const int r = E.rank();
  const int n = g.complex_dim();
  const int R = g.stencil().radius;
  const CMat id = identity(r);
  ValidationReport rep;
  auto lbl = [](std::initializer_list<int> c) {
    std::string s = "U";
    for (int x : c) s += "_" + std::to_string(x);
    return s;
  };

  for (int i = 0; i < nc; ++i) {
    double m = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      if (cover.contains(i, idx)) m = std::max(m, (E.transition(i, i, idx) - id).cwiseAbs().maxCoeff());
    rep.add("identity", lbl({i}), m, kAlgebraicTol);
  }

  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      double mi = 0, mh = 0;
      for (std::size_t idx : cover.intersection({i, j})) {
        const CMat a = E.transition(i, j, idx);
        const CMat b = E.transition(j, i, idx);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());
        mi = std::max(mi, (a * b - id).cwiseAbs().maxCoeff() / scale);
        mi = std::max(mi, (b * a - id).cwiseAbs().maxCoeff() / scale);
      }
      const Stencil& st = g.stencil();
      for (std::size_t idx : cover.intersection({i, j}, R)) {
        const CMat inv = E.transition(i, j, idx).inverse();
        for (int a = 0; a < n; ++a) {
          CMat dx = CMat::Zero(r, r), dy = CMat::Zero(r, r);
          for (std::size_t q = 0; q < st.offsets.size(); ++q) {
            dx += st.weights[q] * E.transition(i, j, g.shift(idx, 2 * a, st.offsets[q]));
            dy += st.weights[q] * E.transition(i, j, g.shift(idx, 2 * a + 1, st.offsets[q]));
          }
          const CMat dbar = 0.5 * (dx / g.spacing(2 * a) + kI * dy / g.spacing(2 * a + 1));
          mh = std::max(mh, (inv * dbar).cwiseAbs().maxCoeff());
        }
      }
      rep.add("inverse", lbl({i, j}), mi, kAlgebraicTol);
      rep.add("holomorphic", lbl({i, j}), mh, differential_tol(g.h()));
    }

  const TwistData& tw = *E.twist();
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j)
      for (int k = 0; k < nc; ++k) {
        if (i == j || j == k || i == k) continue;
        double m = 0;
        for (std::size_t idx : cover.intersection({i, j, k})) {
          const CMat p = E.transition(k, i, idx) * E.transition(j, k, idx) * E.transition(i, j, idx);
          m = std::max(m, (p - tw.alpha_at(i, j, k, idx) * id).cwiseAbs().maxCoeff());
        }
        rep.add("cocycle", lbl({i, j, k}), m, kAlgebraicTol);
      }
  return rep;
}

}  // namespace twhe
