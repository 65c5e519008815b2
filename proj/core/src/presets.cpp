#include "twhe/presets.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "twhe/container.hpp"
#include "twhe/errors.hpp"
#include "twhe/expressions.hpp"
#include "twhe/spectral.hpp"

namespace twhe {

namespace {

std::pair<std::string, std::string> split_head(const std::string& preset) {
  const auto p = preset.find(':');
  if (p == std::string::npos) return {preset, ""};
  return {preset.substr(0, p), preset.substr(p + 1)};
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("expected an integer in '" + what + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("expected a number in '" + what + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Parts of "sum:[a;b;...]".
std::vector<std::string> sum_parts(const std::string& arg, const std::string& preset) {
  if (arg.size() < 2 || arg.front() != '[' || arg.back() != ']')
    throw ConfigError("sum preset must look like sum:[p1;p2] in '" + preset + "'");
  return split_list(arg.substr(1, arg.size() - 2), ';');
}

void bundle_axes(const std::string& preset, std::set<int>& axes) {
  const auto [head, arg] = split_head(preset);
  if (head == "clock-shift") {
    axes.insert({0, 1});
  } else if (head == "theta") {
    if (parse_int(arg, preset) != 0) axes.insert(1);
  } else if (head == "line") {
    const auto v = split_list(arg, ',');
    if (v.size() != 2) throw ConfigError("line preset needs two degrees in '" + preset + "'");
    if (parse_int(v[0], preset) != 0) axes.insert(1);
    if (parse_int(v[1], preset) != 0) axes.insert(3);
  } else if (head == "sum") {
    for (const auto& p : sum_parts(arg, preset)) bundle_axes(p, axes);
  }
}

CMat hermitian_sqrt(const CMat& g) {
  return spectral_function(selfadjoint_eigen(g, identity(static_cast<int>(g.rows()))),
                           [](double x) { return std::sqrt(x); });
}

}  // namespace

const std::vector<PresetInfo>& preset_registry() {
  static const std::vector<PresetInfo> reg = {
      {"geometry", "flat", "flat", "constant metric given by the lattice",
       "omega = (i/2) sum dz_a ^ dzbar_a on the rectangular torus with the configured periods."},
      {"geometry", "conformal", "conformal:<expr>", "conformally flat metric e^{f} * flat",
       "The expression f is a sum of trigonometric atoms (see expressions). Every metric on a torus of "
       "complex dimension one is Gauduchon; in dimension two the conformal factor generally breaks it."},
      {"twist", "trivial", "trivial", "B = 0, beta = 0, alpha = 1", "The untwisted case; any cover."},
      {"twist", "global-b", "global-b:<c>", "same B on every chart, sqrt(-1) B = c omega",
       "beta = 0 and alpha = 1, so the twist is cohomologically trivial but shifts sqrt(-1) Lambda F by "
       "-c n Id."},
      {"twist", "clock-shift", "clock-shift:<r>", "mu_r-valued cocycle of the clock/shift representation",
       "Cover banded along x1 and y1. alpha_ijk is read off the triple products of the clock matrix C on "
       "x1 seams and the shift matrix S on y1 seams, CS = zeta SC with zeta = e^{2 pi i / r}."},
      {"twist", "container", "container:<path>", "twist data loaded from a field container",
       "Fields B (per chart), beta:i:j and alpha:i:j:k on the cover stored in the container header."},
      {"bundle", "trivial", "trivial:<r>", "trivial bundle of rank r", "Identity transitions; trivial twist."},
      {"bundle", "clock-shift", "clock-shift:<r>", "rank-r projectively flat bundle",
       "Transitions are the constant clock matrix across x1 wrap seams and the shift matrix across y1 "
       "wrap seams (identity on mid seams). Needs the clock-shift:<r> twist. Reference metric: identity, "
       "which is flat."},
      {"bundle", "theta", "theta:<d>", "line bundle of degree d along z1",
       "Cover banded along y1. Across the wrap seam the transition from band 0 to band 1 is the winding "
       "factor e^{pi d - 2 pi i d z} with z = x + i y in unit coordinates lifted into band 0; mid seams "
       "are the identity. Reference metric e^{-2 pi d y^2} with y lifted into the chart, which has "
       "constant curvature and degree d."},
      {"bundle", "line", "line:<d1>,<d2>", "line bundle of bidegree (d1, d2), n = 2",
       "Product of theta factors along z1 and z2; the cover bands y1 and y2 as needed."},
      {"bundle", "sum", "sum:[<p1>;<p2>;...]", "direct sum of bundle presets sharing a twist",
       "Block-diagonal transitions and reference metric; blocks are addressable as summand:<k> candidates."},
      {"seed", "identity", "identity", "seed Id on every chart, averaged by the partition of unity",
       "For unitary transitions this is the flat metric."},
      {"seed", "reference", "reference", "closed-form metric published by the bundle builder", ""},
      {"seed", "reference*scalar", "reference*scalar:<expr>", "reference metric times e^{f}",
       "The factor is kept as an exact conformal factor of the metric."},
      {"seed", "diag", "diag:<e1>,...,<er>", "R^{1/2} diag(e^{e_k}) R^{1/2} on every chart",
       "R is the reference metric of the chart; the seeds are averaged by the partition of unity."},
      {"seed", "herm", "herm:<d1>,...,<dr>,<re12>,<im12>,...", "R^{1/2} exp(X) R^{1/2}",
       "X is Hermitian with the given diagonal expressions and the (re, im) parts of the entries "
       "above the diagonal in row-major order."},
      {"seed", "container", "container:<path>", "metric loaded from a field container", ""},
  };
  return reg;
}

const PresetInfo& find_preset(const std::string& name) {
  const std::string head = split_head(name).first;
  for (const auto& p : preset_registry())
    if (p.name == head || p.pattern == name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}

std::string list_presets_text() {
  std::ostringstream out;
  std::string kind;
  for (const auto& p : preset_registry()) {
    if (p.kind != kind) {
      kind = p.kind;
      out << kind << ":\n";
    }
    out << "  " << p.pattern << "\n      " << p.summary << "\n";
  }
  return out.str();
}

std::string describe_preset_text(const std::string& name) {
  std::ostringstream out;
  bool any = false;
  const std::string head = split_head(name).first;
  for (const auto& p : preset_registry()) {
    if (p.name != head) continue;
    any = true;
    out << p.pattern << " (" << p.kind << ")\n  " << p.summary << "\n";
    if (!p.details.empty()) out << "  " << p.details << "\n";
  }
  if (!any) throw ConfigError("unknown preset '" + name + "'");
  return out.str();
}

TorusGeometry build_geometry(const std::string& preset, const GridPtr& grid) {
  const auto [head, arg] = split_head(preset);
  if (head == "flat" && arg.empty()) return TorusGeometry::flat(grid);
  if (head == "conformal") {
    TorusGeometry g = TorusGeometry::conformal(ScalarExpr::parse(arg).sample(grid));
    g.id = preset;
    return g;
  }
  throw ConfigError("unknown geometry preset '" + preset + "'");
}

std::vector<int> required_banded_axes(const std::string& twist, const std::string& bundle) {
  std::set<int> axes;
  if (split_head(twist).first == "clock-shift") axes.insert({0, 1});
  bundle_axes(bundle, axes);
  return {axes.begin(), axes.end()};
}

TwistPtr build_twist(const std::string& preset, const CoverPtr& cover, const TorusGeometry& geom) {
  const auto [head, arg] = split_head(preset);
  if (head == "trivial" && arg.empty()) return build_trivial_twist(cover);
  if (head == "global-b") return build_constant_B(cover, parse_double(arg, preset), geom);
  if (head == "clock-shift") return build_clock_shift_twist(cover, parse_int(arg, preset));
  if (head == "container") return twist_from_container(read_container(arg), cover, preset);
  throw ConfigError("unknown twist preset '" + preset + "'");
}

TwistedBundle build_bundle(const std::string& preset, const TwistPtr& twist) {
  const auto [head, arg] = split_head(preset);
  if (head == "trivial") return build_trivial_bundle(twist, parse_int(arg, preset));
  if (head == "clock-shift") return build_clock_shift_bundle(twist, parse_int(arg, preset));
  if (head == "theta") return build_theta_bundle(twist, parse_int(arg, preset));
  if (head == "line") {
    const auto v = split_list(arg, ',');
    if (v.size() != 2) throw ConfigError("line preset needs two degrees in '" + preset + "'");
    return build_theta_bundle(twist, parse_int(v[0], preset), parse_int(v[1], preset));
  }
  if (head == "sum") {
    std::vector<TwistedBundle> parts;
    for (const auto& p : sum_parts(arg, preset)) parts.push_back(build_bundle(p, twist));
    return direct_sum(parts);
  }
  throw ConfigError("unknown bundle preset '" + preset + "'");
}

MetricField build_metric(const std::string& preset, const TwistedBundle& E) {
  const auto [head, arg] = split_head(preset);
  const Grid& g = *E.grid();
  const int r = E.rank();
  MetricField out;
  if (head == "identity" && arg.empty()) {
    out = build_compatible_metric(E, [r](int, std::size_t) { return identity(r); });
  } else if (head == "reference" && arg.empty()) {
    out = reference_metric(E);
  } else if (head == "reference*scalar") {
    out = reference_metric(E).conformally_scaled(ScalarExpr::parse(arg).sample(E.grid()));
  } else if (head == "diag" || head == "herm") {
    if (!E.reference_metric()) throw ConfigError("seed '" + preset + "' needs a bundle with a reference metric");
    const auto items = split_list(arg, ',');
    const std::size_t want = head == "diag" ? r : static_cast<std::size_t>(r * r);
    if (items.size() != want)
      throw ConfigError("seed '" + preset + "' needs " + std::to_string(want) + " expressions");
    std::vector<ScalarExpr> ex;
    for (const auto& s : items) ex.push_back(ScalarExpr::parse(s));
    const auto& ref = E.reference_metric();
    out = build_compatible_metric(E, [&](int c, std::size_t idx) {
      const auto u = unit_coords(g, idx);
      CMat X = CMat::Zero(r, r);
      for (int j = 0; j < r; ++j) X(j, j) = ex[j](u);
      std::size_t q = r;
      if (head == "herm")
        for (int j = 0; j < r; ++j)
          for (int k = j + 1; k < r; ++k) {
            const cd v(ex[q](u), ex[q + 1](u));
            q += 2;
            X(j, k) = v;
            X(k, j) = std::conj(v);
          }
      const CMat R = hermitian_sqrt(ref(c, idx));
      return CMat(R * endo_exp(X, identity(r)) * R);
    });
  } else if (head == "container") {
    out = metric_from_container(read_container(arg), E.cover());
  } else {
    throw ConfigError("unknown metric seed '" + preset + "'");
  }
  out.id = preset;
  return out;
}

}  // namespace twhe
