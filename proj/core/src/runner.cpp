#include "twhe/runner.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "twhe/chern.hpp"
#include "twhe/container.hpp"
#include "twhe/errors.hpp"
#include "twhe/presets.hpp"
#include "twhe/report.hpp"

namespace twhe {

namespace {

class Pipeline {
 public:
  Pipeline(const ExperimentConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt) {
    dir_ = opt.out_dir.empty() ? cfg.output.directory : opt.out_dir;
  }

  RunResult run() {
    RunResult res;
    try {
      std::filesystem::create_directories(dir_);
      execute(res);
    } catch (const std::exception& e) {
      res.failures.push_back(std::string("error: ") + e.what());
      line(std::string("error: ") + e.what());
    }
    res.exit_code = !res.failures.empty() ? kExitFailure : res.plateau ? kExitPlateau : kExitOk;
    line("exit " + std::to_string(res.exit_code));
    res.report = text_.str();
    try {
      std::ofstream(std::filesystem::path(dir_) / "report.txt") << res.report;
    } catch (const std::exception&) {
    }
    return res;
  }

 private:
  void line(const std::string& s) {
    text_ << s << "\n";
    if (opt_.log) *opt_.log << s << std::endl;
  }
  void check(RunResult& res, const std::string& name, double value, double tol, bool upper = true, int indent = 2) {
    const bool ok = upper ? value <= tol : value >= tol;
    line(std::string(indent, ' ') + name + " = " + fmt(value) + (upper ? " <= " : " >= ") + fmt(tol) + (ok ? "  ok" : "  FAIL"));
    if (!ok) res.failures.push_back(name);
  }
  std::string path(const std::string& file) const { return (std::filesystem::path(dir_) / file).string(); }

  void execute(RunResult& res) {
    const auto& gc = cfg_.geometry;
    line("experiment " + (cfg_.name.empty() ? std::string("(unnamed)") : cfg_.name));
    const GridPtr grid = make_grid(gc.dim, gc.resolution, gc.lattice, static_cast<FdOrder>(gc.fd_order));
    const double h = grid->h();
    const double dtol = differential_tol(h);
    const TorusGeometry geom = build_geometry(gc.metric, grid);
    const auto cover = std::make_shared<const ChartCover>(grid, required_banded_axes(cfg_.twist, cfg_.bundle));
    const TwistPtr twist = build_twist(cfg_.twist, cover, geom);
    const TwistedBundle E = build_bundle(cfg_.bundle, twist);
    MetricField K = build_metric(cfg_.background.seed, E);
    line("geometry " + gc.metric + " n=" + std::to_string(gc.dim) + " N=" + std::to_string(gc.resolution) +
         " h=" + fmt(h) + " charts=" + std::to_string(cover->num_charts()));
    line("twist " + twist->id + ", bundle " + E.id() + " rank " + std::to_string(E.rank()) + ", seed " + K.id);

    if (cfg_.analyses.validate) {
      line("validate");
      for (const auto& rep : {validate_twist(*twist), validate_bundle(E)})
        for (const auto& c : rep.checks) check(res, c.name + (c.where.empty() ? "" : "@" + c.where), c.defect, c.tol);
      check(res, "metric_compatibility", metric_compatibility_defect(K, E), kAlgebraicTol);
    }
    if (cfg_.background.normalize) {
      double mean = 0;
      K = normalize_background(K, E, geom, &mean);
      line("normalize");
      check(res, "mean_trace_phi", mean, 1e-9);
    }
    if (cfg_.analyses.chern) {
      const double deg = degree(K, E, geom);
      line("chern");
      line("  degree = " + fmt(deg));
      line("  slope = " + fmt(deg / E.rank()));
      line("  lambda = " + fmt(hermite_einstein_constant(K, E, geom)));
      line("  volume = " + fmt(geom.volume()));
      if (gc.dim == 2) line("  gauduchon_defect = " + fmt(gauduchon_defect(geom)));
    }
    if (cfg_.analyses.bogomolov) {
      if (gc.dim != 2) throw UnsupportedDimensionError("bogomolov analysis needs n = 2");
      line("bogomolov");
      line("  bogomolov_number = " + fmt(bogomolov_number(K, E, geom)));
      const auto d = bogomolov_decomposition(K, E, geom);
      line("  decomposition lhs = " + fmt(d.lhs) + ", rhs = " + fmt(d.rhs));
      check(res, "bogomolov_decomposition_defect", d.defect(), dtol);
    }
    if (!cfg_.analyses.candidates.empty()) verdict(res, K, E, geom);
    if (cfg_.analyses.sweep) sweep(res, K, E, geom, dtol);
  }

  void verdict(RunResult& res, const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom) {
    std::vector<SubbundleCandidate> cands;
    for (const auto& c : cfg_.analyses.candidates) {
      if (c.rfind("summand:", 0) == 0) {
        cands.push_back(factor_candidate(K, E, std::stoi(c.substr(8))));
      } else {
        const FieldContainer fc = read_container(c.substr(10));
        SubbundleCandidate sc;
        sc.label = c;
        sc.projector = EndoField(K.grid(), K.rank());
        sc.projector.data() = fc.require("projector").field.data();
        sc.declared_rank = static_cast<int>(std::lround(sc.projector.get(0).trace().real()));
        cands.push_back(std::move(sc));
      }
    }
    const StabilityVerdict v = verdict_against(cands, K, E, geom, cfg_.analyses.verdict_tol);
    line("stability");
    line("  bundle slope = " + fmt(v.bundle_slope));
    for (const auto& c : v.candidates)
      line("  candidate " + c.label + ": rank " + std::to_string(c.rank) + ", degree " + fmt(c.degree) +
           ", margin " + fmt(c.margin));
    line(std::string("  verdict = ") + to_string(v.verdict));
    if (cfg_.output.csv) {
      CsvWriter w(path("verdict.csv"), kVerdictSchema, {"label", "rank", "degree", "slope", "margin"});
      for (const auto& c : v.candidates)
        w.row({c.label, std::to_string(c.rank), fmt(c.degree), fmt(c.slope), fmt(c.margin)});
    }
    res.verdict = v;
  }

  std::vector<SolverTrace> solve_all(const PerturbedProblem& P) {
    const auto& sched = cfg_.solver.schedule;
    const SolverOptions& o = cfg_.solver.options;
    if (opt_.jobs <= 1 || sched.size() == 1) return epsilon_sweep(P, sched, o);
    // Independent cold starts, merged in schedule order.
    std::vector<SolverTrace> out(sched.size());
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex m;
    const int workers = std::min<int>(opt_.jobs, static_cast<int>(sched.size()));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(m);
            if (next >= sched.size()) return;
            i = next++;
          }
          SolverOptions oi = o;
          oi.epsilon = sched[i];
          try {
            out[i] = solve_perturbed(P, oi);
          } catch (const Error& e) {
            out[i].epsilon = sched[i];
            out[i].error = e.what();
          }
        }
      });
    for (auto& t : pool) t.join();
    return out;
  }

  void sweep(RunResult& res, const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom, double dtol) {
    const PerturbedProblem P(K, E, geom);
    line("sweep");
    res.traces = solve_all(P);
    const double tol = cfg_.solver.options.residual_tol;
    for (const auto& t : res.traces) {
      if (!t.error.empty()) {
        line("  eps " + fmt(t.epsilon) + ": " + t.error);
        res.failures.push_back("solve eps=" + fmt(t.epsilon));
        continue;
      }
      line("  eps " + fmt(t.epsilon) + ": " + to_string(t.status) + " in " + std::to_string(t.history.size() - 1) +
           " iterations, residual " + fmt(t.residual) + ", phi_residual " + fmt(t.phi_residual) +
           ", max|log h| " + fmt(t.max_log_h) + ", det drift " + fmt(t.det_drift) + ", skew " + fmt(t.skew_defect));
      if (cfg_.analyses.lemma31) {
        check(res, "lemma31_bound2_slack", t.lemma31_bound_slack, -dtol * std::max(1.0, t.max_log_h), false, 4);
        line("    lemma31_pointwise_defect = " + fmt(t.lemma31_pointwise_defect));
      }
      if (cfg_.analyses.lemma32) {
        const auto l = check_lemma32(P, t.s, t.epsilon, tol);
        check(res, "lemma32_identity_defect", l.defect, l.budget, true, 4);
        check(res, "lemma32_pointwise_defect", l.pointwise_defect, dtol, true, 4);
      }
      if (cfg_.output.csv) write_trace_csv(path(trace_file_name(t.epsilon)), t);
    }
    if (cfg_.output.csv) write_summary_csv(path("summary.csv"), res.traces);
    if (!res.traces.empty() && res.traces.back().error.empty()) {
      const double first = res.traces.front().phi_residual;
      const double last = res.traces.back().phi_residual;
      res.plateau = last > cfg_.analyses.plateau_threshold && (res.traces.size() == 1 || last > 0.5 * first);
      line(std::string("  phi_residual trend: ") + fmt(first) + " -> " + fmt(last) +
           (res.plateau ? " (plateau)" : ""));
    }
    if (cfg_.analyses.probe && !res.traces.empty() && res.traces.back().error.empty()) probe(res, K, E, geom);
  }

  void probe(RunResult& res, const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom) {
    const ProbeReport pr = uy_probe(res.traces.back().s, K, E, geom, cfg_.analyses.probe_options);
    line("probe");
    line("  |s|_L2 = " + fmt(pr.l2_norm));
    if (!pr.conclusive) {
      line("  inconclusive: " + pr.reason);
    } else {
      for (std::size_t j = 0; j < pr.levels.size(); ++j)
        line("  level " + std::to_string(j + 1) + ": " + fmt(pr.levels[j].value) + " +- " + fmt(pr.levels[j].stddev) +
             " multiplicity " + std::to_string(pr.levels[j].multiplicity));
      for (std::size_t j = 0; j < pr.projectors.size(); ++j) {
        const auto& p = pr.projectors[j];
        line("  E_" + std::to_string(j + 1) + ": rank " + std::to_string(p.rank) + ", degree " + fmt(p.degree) +
             ", margin " + fmt(p.margin) + ", weak holomorphicity defect " + fmt(p.weak_holomorphic));
      }
      line("  nu = " + fmt(pr.nu_weighted) + " (margin form " + fmt(pr.nu_margins) + ")");
      line(std::string("  ") + (pr.destabilizing ? "destabilizing structure found" : "no destabilizing structure"));
      if (cfg_.output.csv) {
        CsvWriter w(path("probe.csv"), kProbeSchema,
                    {"j", "level", "level_stddev", "rank", "degree", "margin", "weak_holomorphic", "nu"});
        for (std::size_t j = 0; j < pr.projectors.size(); ++j) {
          const auto& p = pr.projectors[j];
          w.row({std::to_string(j + 1), fmt(pr.levels[j].value), fmt(pr.levels[j].stddev), std::to_string(p.rank),
                 fmt(p.degree), fmt(p.margin), fmt(p.weak_holomorphic), fmt(pr.nu_weighted)});
        }
      }
    }
    res.probe = pr;
  }

  const ExperimentConfig& cfg_;
  const RunOptions& opt_;
  std::string dir_;
  std::ostringstream text_;
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) { return Pipeline(cfg, opt).run(); }

RunResult run_config_file(const std::string& path, const RunOptions& opt) {
  try {
    return run_experiment(load_config(path), opt);
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = kExitFailure;
    r.failures.push_back(e.what());
    r.report = std::string("config error: ") + e.what() + "\n";
    if (opt.log) *opt.log << r.report;
    return r;
  }
}

}  // namespace twhe
