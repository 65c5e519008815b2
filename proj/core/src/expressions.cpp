#include "twhe/expressions.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "twhe/errors.hpp"

namespace twhe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

using Fn = std::function<double(const std::array<double, 4>&)>;

Fn trig(bool cosine, std::vector<int> axes) {
  return [cosine, axes](const std::array<double, 4>& u) {
    double arg = 0;
    for (int a : axes) arg += u[a];
    arg *= kTwoPi;
    return cosine ? std::cos(arg) : std::sin(arg);
  };
}

Fn random_fn(unsigned seed, int n) {
  // Modes with |k_a| <= 2 on each real axis, amplitudes decaying with |k|^2.
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  struct Mode {
    std::array<int, 4> k;
    double c, s;
  };
  std::vector<Mode> modes;
  const int dims = 2 * n;
  std::array<int, 4> k{};
  const int total = static_cast<int>(std::pow(5, dims));
  for (int m = 0; m < total; ++m) {
    int t = m, norm2 = 0;
    for (int a = 0; a < dims; ++a) {
      k[a] = t % 5 - 2;
      t /= 5;
      norm2 += k[a] * k[a];
    }
    if (norm2 == 0) continue;
    const double w = 1.0 / (1.0 + norm2);
    modes.push_back({k, w * normal(rng), w * normal(rng)});
  }
  double scale = 0;
  for (const auto& md : modes) scale += md.c * md.c + md.s * md.s;
  scale = 1.0 / std::sqrt(scale);
  return [modes, scale, dims](const std::array<double, 4>& u) {
    double acc = 0;
    for (const auto& md : modes) {
      double arg = 0;
      for (int a = 0; a < dims; ++a) arg += md.k[a] * u[a];
      arg *= kTwoPi;
      acc += md.c * std::cos(arg) + md.s * std::sin(arg);
    }
    return acc * scale;
  };
}

Fn atom(const std::string& name) {
  if (name == "one") return [](const std::array<double, 4>&) { return 1.0; };
  if (name == "cosx") return trig(true, {0});
  if (name == "sinx") return trig(false, {0});
  if (name == "cosy") return trig(true, {1});
  if (name == "siny") return trig(false, {1});
  if (name == "cosxy") return trig(true, {0, 1});
  if (name == "sinxy") return trig(false, {0, 1});
  if (name == "cosx2") return trig(true, {2});
  if (name == "sinx2") return trig(false, {2});
  if (name == "cosy2") return trig(true, {3});
  if (name == "siny2") return trig(false, {3});
  if (name.rfind("rand", 0) == 0 && name.size() > 4) {
    const unsigned seed = static_cast<unsigned>(std::stoul(name.substr(4)));
    return random_fn(seed, 2);
  }
  throw ConfigError("unknown expression atom '" + name + "'");
}

}  // namespace

ScalarExpr ScalarExpr::parse(const std::string& text) {
  ScalarExpr e;
  e.text_ = text;
  std::stringstream ss(text);
  std::string term;
  while (std::getline(ss, term, '+')) {
    term = trim(term);
    if (term.empty()) throw ConfigError("empty term in expression '" + text + "'");
    double coef = 1.0;
    const auto star = term.find('*');
    std::string name = term;
    if (star != std::string::npos) {
      try {
        coef = std::stod(trim(term.substr(0, star)));
      } catch (const std::exception&) {
        throw ConfigError("bad coefficient in expression '" + text + "'");
      }
      name = trim(term.substr(star + 1));
    }
    e.terms_.push_back({coef, atom(name)});
  }
  return e;
}

ScalarExpr ScalarExpr::random(unsigned seed, int complex_dim, double amplitude) {
  ScalarExpr e;
  e.text_ = std::to_string(amplitude) + "*rand" + std::to_string(seed);
  e.terms_.push_back({amplitude, random_fn(seed, complex_dim)});
  return e;
}

double ScalarExpr::operator()(const std::array<double, 4>& u) const {
  double acc = 0;
  for (const auto& t : terms_) acc += t.coef * t.fn(u);
  return acc;
}

std::array<double, 4> unit_coords(const Grid& g, std::size_t idx) {
  std::array<double, 4> u{};
  for (int a = 0; a < g.real_dim(); ++a)
    u[a] = static_cast<double>(g.coord(idx, a)) / g.resolution();
  return u;
}

RealField ScalarExpr::sample(const GridPtr& grid) const {
  RealField f(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) f[i] = (*this)(unit_coords(*grid, i));
  return f;
}

}  // namespace twhe
