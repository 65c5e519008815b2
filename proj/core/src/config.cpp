#include "twhe/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "twhe/errors.hpp"
#include "twhe/presets.hpp"

namespace twhe {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  std::string where(const YAML::Node& n, const std::string& field) const {
    std::ostringstream s;
    s << origin_;
    if (n.Mark().line >= 0) s << ":" << n.Mark().line + 1 << ":" << n.Mark().column + 1;
    s << " " << field;
    return s.str();
  }

  // Rejects keys outside `allowed`.
  void check_keys(const YAML::Node& n, const std::string& block, const std::set<std::string>& allowed) const {
    if (!n.IsMap()) throw ConfigError("expected a mapping", where(n, block));
    for (const auto& kv : n) {
      const std::string k = kv.first.as<std::string>();
      if (!allowed.count(k)) throw ConfigError("unknown key", where(kv.first, block + "." + k));
    }
  }

  template <class T>
  void read(const YAML::Node& parent, const std::string& block, const std::string& key, T& out) const {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("wrong type", where(n, block + "." + key));
    }
  }

 private:
  std::string origin_;
};

void validate(const ExperimentConfig& c, const YAML::Node& root, const Reader& rd) {
  const auto geo = root["geometry"];
  const auto& g = c.geometry;
  if (g.dim != 1 && g.dim != 2) throw ConfigError("dim must be 1 or 2", rd.where(geo, "geometry.dim"));
  if (g.resolution < 8) throw ConfigError("resolution must be at least 8", rd.where(geo, "geometry.resolution"));
  if (!g.lattice.empty() && static_cast<int>(g.lattice.size()) != 2 * g.dim)
    throw ConfigError("lattice needs one period per real axis", rd.where(geo, "geometry.lattice"));
  for (double p : g.lattice)
    if (!(p > 0)) throw ConfigError("lattice periods must be positive", rd.where(geo, "geometry.lattice"));
  if (g.fd_order != 2 && g.fd_order != 4) throw ConfigError("fd_order must be 2 or 4", rd.where(geo, "geometry.fd_order"));

  const auto sol = root["solver"];
  const auto& sched = c.solver.schedule;
  if (sched.empty()) throw ConfigError("epsilon schedule is empty", rd.where(sol, "solver.epsilon"));
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (!(sched[i] > 0 && sched[i] <= 1))
      throw ConfigError("epsilon values must lie in (0, 1]", rd.where(sol, "solver.epsilon"));
    if (i > 0 && !(sched[i] < sched[i - 1]))
      throw ConfigError("epsilon schedule must be strictly decreasing", rd.where(sol, "solver.epsilon"));
  }
  const auto& o = c.solver.options;
  if (!(o.residual_tol > 0)) throw ConfigError("residual_tol must be positive", rd.where(sol, "solver.residual_tol"));
  if (o.max_iters < 0) throw ConfigError("max_iters must be non-negative", rd.where(sol, "solver.max_iters"));
  if (!(o.step_size > 0 && o.step_size <= 1))
    throw ConfigError("step_size must lie in (0, 1]", rd.where(sol, "solver.step_size"));

  // Preset names must resolve.
  auto known = [&](const std::string& name, const char* field) {
    try {
      find_preset(name);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), rd.where(root[field] ? root[field] : root, field));
    }
  };
  known(c.twist, "twist");
  known(c.bundle, "bundle");
  known(c.geometry.metric, "geometry");
  known(c.background.seed, "background");
  for (const auto& cand : c.analyses.candidates)
    if (cand.rfind("summand:", 0) != 0 && cand.rfind("container:", 0) != 0)
      throw ConfigError("candidate must be summand:<k> or container:<path>", rd.where(root["analyses"], "analyses.candidates"));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream s;
    s << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1;
    throw ConfigError(e.msg, s.str());
  }
  Reader rd(origin);
  ExperimentConfig c;
  if (!root.IsMap()) throw ConfigError("top level must be a mapping", origin);
  rd.check_keys(root, "", {"name", "geometry", "twist", "bundle", "background", "solver", "analyses", "output"});
  rd.read(root, "", "name", c.name);

  if (const auto n = root["geometry"]) {
    rd.check_keys(n, "geometry", {"dim", "resolution", "lattice", "metric", "fd_order"});
    rd.read(n, "geometry", "dim", c.geometry.dim);
    rd.read(n, "geometry", "resolution", c.geometry.resolution);
    rd.read(n, "geometry", "lattice", c.geometry.lattice);
    rd.read(n, "geometry", "metric", c.geometry.metric);
    rd.read(n, "geometry", "fd_order", c.geometry.fd_order);
  }
  if (c.geometry.resolution == 0)
    c.geometry.resolution = c.geometry.dim == 2 ? kDefaultResolution2 : kDefaultResolution1;
  rd.read(root, "", "twist", c.twist);
  rd.read(root, "", "bundle", c.bundle);
  if (const auto n = root["background"]) {
    rd.check_keys(n, "background", {"seed", "normalize"});
    rd.read(n, "background", "seed", c.background.seed);
    rd.read(n, "background", "normalize", c.background.normalize);
  }
  if (const auto n = root["solver"]) {
    rd.check_keys(n, "solver", {"epsilon", "residual_tol", "max_iters", "step_size", "min_step", "krylov_tol",
                                "krylov_max_iters"});
    auto& o = c.solver.options;
    if (n["epsilon"] && n["epsilon"].IsScalar()) {
      double e = 0;
      rd.read(n, "solver", "epsilon", e);
      c.solver.schedule = {e};
    } else {
      rd.read(n, "solver", "epsilon", c.solver.schedule);
    }
    rd.read(n, "solver", "residual_tol", o.residual_tol);
    rd.read(n, "solver", "max_iters", o.max_iters);
    rd.read(n, "solver", "step_size", o.step_size);
    rd.read(n, "solver", "min_step", o.min_step);
    rd.read(n, "solver", "krylov_tol", o.krylov.tol);
    rd.read(n, "solver", "krylov_max_iters", o.krylov.max_iters);
  }
  if (const auto n = root["analyses"]) {
    rd.check_keys(n, "analyses", {"validate", "chern", "bogomolov", "lemma31", "lemma32", "sweep", "probe",
                                  "candidates", "plateau_threshold", "verdict_tol", "probe_gap_fraction",
                                  "probe_min_norm"});
    auto& a = c.analyses;
    rd.read(n, "analyses", "validate", a.validate);
    rd.read(n, "analyses", "chern", a.chern);
    rd.read(n, "analyses", "bogomolov", a.bogomolov);
    rd.read(n, "analyses", "lemma31", a.lemma31);
    rd.read(n, "analyses", "lemma32", a.lemma32);
    rd.read(n, "analyses", "sweep", a.sweep);
    rd.read(n, "analyses", "probe", a.probe);
    rd.read(n, "analyses", "candidates", a.candidates);
    rd.read(n, "analyses", "plateau_threshold", a.plateau_threshold);
    rd.read(n, "analyses", "verdict_tol", a.verdict_tol);
    rd.read(n, "analyses", "probe_gap_fraction", a.probe_options.gap_fraction);
    rd.read(n, "analyses", "probe_min_norm", a.probe_options.min_l2_norm);
  }
  if (const auto n = root["output"]) {
    rd.check_keys(n, "output", {"directory", "csv"});
    rd.read(n, "output", "directory", c.output.directory);
    rd.read(n, "output", "csv", c.output.csv);
  }
  validate(c, root, rd);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace twhe
