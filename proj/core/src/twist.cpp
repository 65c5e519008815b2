#include "twhe/twist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "twhe/errors.hpp"
#include "twhe/geometry.hpp"

namespace twhe {

namespace {

std::string label(std::initializer_list<int> charts) {
  std::string s = "U";
  for (int c : charts) s += "_" + std::to_string(c);
  return s;
}

// Returns +1/-1 for the permutation sorting (i, j, k), and the sorted tuple.
int sort3(int& i, int& j, int& k) {
  int sign = 1;
  if (i > j) std::swap(i, j), sign = -sign;
  if (j > k) std::swap(j, k), sign = -sign;
  if (i > j) std::swap(i, j), sign = -sign;
  return sign;
}

}  // namespace

cd TwistData::alpha_at(int i, int j, int k, std::size_t idx) const {
  if (i == j || j == k || i == k) return 1.0;
  const int sign = sort3(i, j, k);
  auto it = alpha.find({i, j, k});
  if (it == alpha.end()) return 1.0;
  const cd v = it->second[idx];
  return sign > 0 ? v : 1.0 / v;
}

cd TwistData::beta_at(int i, int j, int a, std::size_t idx) const {
  if (i == j) return 0.0;
  const bool flip = i > j;
  auto it = beta.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
  if (it == beta.end()) return 0.0;
  const cd v = it->second.coeff(idx, a);
  return flip ? -v : v;
}

cd TwistData::B_at(int i, std::size_t idx, int a, int b) const {
  if (B.empty() || !B[i]) return 0.0;
  return B[i]->coeff(idx, a, b);
}

bool TwistData::has_B() const {
  for (const auto& b : B)
    if (b) return true;
  return false;
}

bool TwistData::same_as(const TwistData& o) const {
  if (this == &o) return true;
  if (!cover->same_as(*o.cover) || id != o.id) return false;
  if (B.size() != o.B.size() || beta.size() != o.beta.size() || alpha.size() != o.alpha.size())
    return false;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (bool(B[i]) != bool(o.B[i])) return false;
    if (B[i] && B[i]->data() != o.B[i]->data()) return false;
  }
  for (const auto& [key, f] : beta) {
    auto it = o.beta.find(key);
    if (it == o.beta.end() || it->second.data() != f.data()) return false;
  }
  for (const auto& [key, f] : alpha) {
    auto it = o.alpha.find(key);
    if (it == o.alpha.end() || it->second.data() != f.data()) return false;
  }
  return true;
}

TwistPtr build_trivial_twist(CoverPtr cover) {
  auto t = std::make_shared<TwistData>();
  t->B.resize(cover->num_charts());
  t->cover = std::move(cover);
  t->id = "trivial";
  return t;
}

TwistPtr build_global_B(CoverPtr cover, const TwoFormField& form) {
  const Grid& g = *cover->grid();
  require_same_grid(*form.f11.grid(), g, "build_global_B");
  double off = 0, scale = 1e-300;
  for (const cd& v : form.f20) off = std::max(off, std::abs(v));
  for (const cd& v : form.f02) off = std::max(off, std::abs(v));
  scale = std::max(scale, form.f11.max_abs());
  if (off > kAlgebraicTol * std::max(1.0, scale))
    throw DomainError("B-field has a (2,0) or (0,2) component of size " + std::to_string(off));
  auto t = std::make_shared<TwistData>();
  t->B.assign(cover->num_charts(), form.f11);
  t->cover = std::move(cover);
  t->id = "global-b";
  return t;
}

TwistPtr build_constant_B(CoverPtr cover, double c, const TorusGeometry& geom) {
  const Grid& g = *cover->grid();
  const int n = g.complex_dim();
  TwoFormField form{Form11Field(cover->grid()), {}, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CMat m = geom.metric(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) form.f11.set_coeff(i, a, b, -kI * c * m(a, b));
  }
  auto t = std::const_pointer_cast<TwistData>(build_global_B(std::move(cover), form));
  t->id = "global-b:" + std::to_string(c);
  return t;
}

CMat clock_matrix(int r) {
  CMat m = CMat::Zero(r, r);
  for (int k = 0; k < r; ++k) m(k, k) = std::polar(1.0, kTwoPi * k / r);
  return m;
}

CMat shift_matrix(int r) {
  CMat m = CMat::Zero(r, r);
  for (int k = 0; k < r; ++k) m((k + 1) % r, k) = 1.0;
  return m;
}

CMat constant_transition(const ChartCover& cover, const std::vector<CMat>& wrap, int from, int to,
                         std::size_t idx) {
  const int r = static_cast<int>(wrap.empty() ? 1 : wrap.front().rows());
  // The wrap matrices need not commute, so only one direction is composed
  // and the other is its inverse.
  if (from > to) return constant_transition(cover, wrap, to, from, idx).inverse();
  CMat phi = identity(r);
  const auto& axes = cover.banded_axes();
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const int bf = cover.band(from, static_cast<int>(k));
    const int bt = cover.band(to, static_cast<int>(k));
    if (bf == bt) continue;
    const auto seam = cover.seam(static_cast<int>(k), idx);
    if (seam == ChartCover::Seam::kNone)
      throw DomainError("transition evaluated outside the overlap");
    if (seam == ChartCover::Seam::kMid) continue;
    phi = (bf == 0 ? wrap[k] : CMat(wrap[k].inverse())) * phi;
  }
  return phi;
}

TwistPtr build_clock_shift_twist(CoverPtr cover, int r) {
  if (r < 1 || r > kMaxRank) throw DomainError("clock-shift rank out of range");
  const auto& axes = cover->banded_axes();
  if (axes.size() < 2 || axes[0] != 0 || axes[1] != 1)
    throw DomainError("clock-shift twist needs a cover banded along x1 then y1");
  auto t = std::make_shared<TwistData>();
  t->B.resize(cover->num_charts());
  t->cover = cover;
  t->id = "clock-shift:" + std::to_string(r);
  if (r == 1) return t;
  std::vector<CMat> wrap(axes.size(), identity(r));
  wrap[0] = clock_matrix(r);
  wrap[1] = shift_matrix(r);
  const int nc = cover->num_charts();
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (int k = j + 1; k < nc; ++k) {
        ComplexField a(cover->grid());
        for (auto& v : a.data()) v = 1.0;
        for (std::size_t idx : cover->intersection({i, j, k})) {
          const CMat p = constant_transition(*cover, wrap, k, i, idx) *
                         constant_transition(*cover, wrap, j, k, idx) *
                         constant_transition(*cover, wrap, i, j, idx);
          const cd s = p(0, 0);
          if ((p - s * identity(r)).norm() > 1e-12)
            throw NumericError("clock-shift transitions are not projectively compatible");
          a[idx] = s;
        }
        t->alpha.emplace(std::array<int, 3>{i, j, k}, std::move(a));
      }
  return t;
}

ValidationReport validate_twist(const TwistData& t) {
  const ChartCover& cover = *t.cover;
  const Grid& g = *cover.grid();
  const int n = g.complex_dim();
  const int nc = cover.num_charts();
  const int R = g.stencil().radius;
  const double dtol = differential_tol(g.h());
  ValidationReport rep;

  auto d_at = [&](const std::function<cd(std::size_t)>& f, std::size_t idx, int axis) {
    const Stencil& st = g.stencil();
    cd acc = 0;
    for (std::size_t q = 0; q < st.offsets.size(); ++q)
      acc += st.weights[q] * f(g.shift(idx, axis, st.offsets[q]));
    return acc / g.spacing(axis);
  };
  auto dz = [&](const std::function<cd(std::size_t)>& f, std::size_t idx, int a) {
    return 0.5 * (d_at(f, idx, 2 * a) - kI * d_at(f, idx, 2 * a + 1));
  };
  auto dzbar = [&](const std::function<cd(std::size_t)>& f, std::size_t idx, int a) {
    return 0.5 * (d_at(f, idx, 2 * a) + kI * d_at(f, idx, 2 * a + 1));
  };

  // (a)
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      double m = 0;
      for (std::size_t idx : cover.intersection({i, j}, R)) {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const cd dbeta =
                2.0 * kI * dzbar([&](std::size_t p) { return t.beta_at(i, j, a, p); }, idx, b);
            m = std::max(m, std::abs(t.B_at(i, idx, a, b) - t.B_at(j, idx, a, b) - dbeta));
          }
        if (n == 2) {
          const cd d20 = dz([&](std::size_t p) { return t.beta_at(i, j, 1, p); }, idx, 0) -
                         dz([&](std::size_t p) { return t.beta_at(i, j, 0, p); }, idx, 1);
          m = std::max(m, std::abs(d20));
        }
      }
      rep.add("dbeta", label({i, j}), m, dtol);
    }

  auto phase = [&](int i, int j, int k, std::size_t p) {
    const cd v = t.alpha_at(i, j, k, p);
    return v / std::abs(v);
  };

  // (b) and (d)
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (int k = j + 1; k < nc; ++k) {
        double mb = 0, md = 0;
        for (std::size_t idx : cover.intersection({i, j, k}, R)) {
          const cd al = phase(i, j, k, idx);
          auto f = [&](std::size_t p) { return phase(i, j, k, p); };
          for (int a = 0; a < n; ++a) {
            const cd s = t.beta_at(i, j, a, idx) + t.beta_at(j, k, a, idx) +
                         t.beta_at(k, i, a, idx) + dz(f, idx, a) / al;
            mb = std::max(mb, std::abs(s));
            mb = std::max(mb, std::abs(dzbar(f, idx, a) / al));
          }
        }
        for (std::size_t idx : cover.intersection({i, j, k}, 0))
          md = std::max(md, std::abs(std::abs(t.alpha_at(i, j, k, idx)) - 1.0));
        rep.add("beta_sum", label({i, j, k}), mb, dtol);
        rep.add("unitary", label({i, j, k}), md, kAlgebraicTol);
      }

  // (c)
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (int k = j + 1; k < nc; ++k)
        for (int l = k + 1; l < nc; ++l) {
          double m = 0;
          for (std::size_t idx : cover.intersection({i, j, k, l}, 0)) {
            const cd d = phase(j, k, l, idx) / phase(i, k, l, idx) * phase(i, j, l, idx) /
                         phase(i, j, k, idx);
            m = std::max(m, std::abs(d - 1.0));
          }
          rep.add("cocycle", label({i, j, k, l}), m, kAlgebraicTol);
        }
  return rep;
}

bool is_mu_r_coboundary(const TwistData& t, int r, std::size_t max_assignments) {
  const ChartCover& cover = *t.cover;
  const int nc = cover.num_charts();
  const int naxes = static_cast<int>(cover.banded_axes().size());
  if (nc < 3) return true;

  auto diff_mask = [&](std::initializer_list<int> charts) {
    int mask = 0;
    for (int k = 0; k < naxes; ++k) {
      int b0 = -1;
      for (int c : charts) {
        const int b = cover.band(c, k);
        if (b0 < 0) b0 = b;
        else if (b != b0) mask |= 1 << k;
      }
    }
    return mask;
  };
  // Seam signature of a point on the axes of `mask`: bit k set for wrap.
  auto signature = [&](int mask, std::size_t idx) {
    int s = 0;
    for (int k = 0; k < naxes; ++k)
      if ((mask >> k & 1) && cover.seam(k, idx) == ChartCover::Seam::kWrap) s |= 1 << k;
    return s;
  };

  // Variables: one exponent per (pair, seam signature over its differing axes).
  std::map<std::tuple<int, int, int>, int> var;
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      const int mask = diff_mask({i, j});
      for (int s = 0; s < (1 << naxes); ++s)
        if ((s & ~mask) == 0) var.emplace(std::make_tuple(i, j, s), static_cast<int>(var.size()));
    }

  struct Constraint {
    int v_ij, v_jk, v_ik, exponent;
  };
  std::vector<Constraint> cons;
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (int k = j + 1; k < nc; ++k) {
        const int mask = diff_mask({i, j, k});
        std::map<int, std::size_t> rep_point;
        for (std::size_t idx : cover.intersection({i, j, k}))
          rep_point.emplace(signature(mask, idx), idx);
        for (const auto& [sig, idx] : rep_point) {
          const cd a = t.alpha_at(i, j, k, idx);
          const double e = std::arg(a) * r / kTwoPi;
          const int ei = static_cast<int>(std::lround(e));
          if (std::abs(a - std::polar(1.0, kTwoPi * ei / r)) > 1e-9) return false;
          cons.push_back({var.at({i, j, sig & diff_mask({i, j})}),
                          var.at({j, k, sig & diff_mask({j, k})}),
                          var.at({i, k, sig & diff_mask({i, k})}), ((ei % r) + r) % r});
        }
      }

  const std::size_t nv = var.size();
  double total = std::pow(static_cast<double>(r), static_cast<double>(nv));
  if (total > static_cast<double>(max_assignments))
    throw DomainError("coboundary search space too large");
  std::vector<int> c(nv, 0);
  for (std::size_t count = 0; count < static_cast<std::size_t>(total); ++count) {
    bool ok = true;
    for (const auto& q : cons)
      if (((c[q.v_ij] + c[q.v_jk] - c[q.v_ik]) % r + r) % r != q.exponent) {
        ok = false;
        break;
      }
    if (ok) return true;
    for (std::size_t p = 0; p < nv; ++p) {
      if (++c[p] < r) break;
      c[p] = 0;
    }
  }
  return false;
}

}  // namespace twhe
