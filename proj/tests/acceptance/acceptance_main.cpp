// Acceptance gate: one PASS/FAIL line per criterion with the measured values
// and runtime. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "faults.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "twhe/chern.hpp"
#include "twhe/expressions.hpp"
#include "twhe/presets.hpp"
#include "twhe/report.hpp"
#include "twhe/solver.hpp"
#include "twhe/stability.hpp"

namespace twhe {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

// A converged solve kept for the energy identity criterion.
struct ConvergedSolve {
  std::string label;
  std::shared_ptr<const PerturbedProblem> problem;
  EndoField s;
  double eps;
  double residual_tol;
};
std::vector<ConvergedSolve> g_converged;

void keep_converged(const std::string& label, const std::shared_ptr<const PerturbedProblem>& P,
                    const SolverTrace& t, double residual_tol) {
  if (t.status == SolveStatus::kConverged && t.error.empty())
    g_converged.push_back({label, P, t.s, t.epsilon, residual_tol});
}

// Checks every defect against its own tolerance and records the worst
// algebraic and differential defects.
void absorb(const ValidationReport& rep, double dtol, double& alg, double& diff, Outcome& o, const std::string& who) {
  for (const auto& c : rep.checks) {
    if (c.tol == kAlgebraicTol) alg = std::max(alg, c.defect);
    else diff = std::max(diff, c.defect);
    o.require(c.pass() && (c.tol == kAlgebraicTol || c.tol <= dtol), who + " " + c.name + " " + c.where);
  }
}

void criterion1(Outcome& o) {
  double alg = 0, diff = 0;
  testing::ThetaSetup T;
  const double dtol = differential_tol(T.grid->h());
  const CoverPtr cover4 = std::make_shared<const ChartCover>(make_grid(1, 32), std::vector<int>{0, 1});
  const double dtol4 = differential_tol(cover4->grid()->h());
  const TorusGeometry geom4 = TorusGeometry::flat(cover4->grid());
  std::vector<std::pair<std::string, TwistPtr>> twists{
      {"trivial", build_trivial_twist(cover4)},
      {"global-b", build_constant_B(cover4, 0.5, geom4)},
      {"clock-shift:2", build_clock_shift_twist(cover4, 2)},
      {"clock-shift:3", build_clock_shift_twist(cover4, 3)},
      {"theta-cover", T.twist}};
  int count = 0;
  for (const auto& [name, t] : twists) {
    absorb(validate_twist(*t), name == "theta-cover" ? dtol : dtol4, alg, diff, o, name);
    ++count;
  }
  std::vector<std::pair<std::string, TwistedBundle>> bundles;
  for (int d = -2; d <= 2; ++d) bundles.emplace_back("theta:" + std::to_string(d), build_theta_bundle(T.twist, d));
  bundles.emplace_back("theta sum", T.split(1, -1));
  bundles.emplace_back("trivial:2", build_trivial_bundle(build_trivial_twist(cover4), 2));
  bundles.emplace_back("trivial:2 global-b", build_trivial_bundle(twists[1].second, 2));
  bundles.emplace_back("clock-shift:2", build_clock_shift_bundle(twists[2].second, 2));
  bundles.emplace_back("clock-shift:3", build_clock_shift_bundle(twists[3].second, 3));
  for (const auto& [name, E] : bundles) {
    absorb(validate_bundle(E), E.grid()->resolution() == 64 ? dtol : dtol4, alg, diff, o, name);
    ++count;
  }
  int faults = 0;
  for (const auto& f : testing::twist_faults(cover4)) {
    const auto failed = validate_twist(*f.twist).failed_names();
    o.require(failed == std::vector<std::string>{f.expected}, "fault " + f.name);
    ++faults;
  }
  const TwistedBundle cs = build_clock_shift_bundle(twists[2].second, 2);
  for (const auto& f : testing::bundle_faults(build_theta_bundle(T.twist, 1), cs)) {
    const auto failed = validate_bundle(f.bundle).failed_names();
    o.require(failed == std::vector<std::string>{f.expected}, "fault " + f.name);
    ++faults;
  }
  o.require(alg <= 1e-10, "algebraic defect");
  o.detail << count << " objects, max algebraic " << alg << ", max differential " << diff << ", " << faults
           << " faults isolated";
}

void criterion2(Outcome& o) {
  testing::ThetaSetup T(64);
  const double tol = differential_tol(T.grid->h());
  double worst = 0, worst_indep = 0;
  const RealField bump = ScalarExpr::parse("0.4*cosx + 0.3*sinxy").sample(T.grid);
  for (int d = -2; d <= 2; ++d) {
    const TwistedBundle E = build_theta_bundle(T.twist, d);
    const MetricField R = reference_metric(E);
    const double deg = degree(R, E, T.geom);
    worst = std::max(worst, std::abs(deg - d));
    worst_indep = std::max(worst_indep, std::abs(degree(R.conformally_scaled(bump), E, T.geom) - deg));
  }
  o.require(worst <= tol, "degree");
  o.require(worst_indep <= tol, "metric independence");
  o.detail << "max |deg - d| " << worst << ", max metric change " << worst_indep << " (tol " << tol << ")";
}

void criterion3(Outcome& o) {
  const GridPtr g = make_grid(1, 64);
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{});
  const TorusGeometry geom = TorusGeometry::flat(g);
  const TwistPtr tw = build_trivial_twist(cover);
  const TwistedBundle L = build_trivial_bundle(tw, 1);
  const RealField psi = ScalarExpr::parse("cosx + 0.5*siny").sample(g);
  SolverOptions opt;
  opt.epsilon = 0.1;
  auto P = std::make_shared<const PerturbedProblem>(reference_metric(L).conformally_scaled(psi), L, geom);
  const SolverTrace t = solve_perturbed(*P, opt);
  keep_converged("helmholtz", P, t, opt.residual_tol);
  const RealField oracle = testing::helmholtz_oracle(psi, 0.1, geom);
  // Both modes of psi have |k| = 1, so the continuum solution is a multiple of psi.
  const double factor = testing::helmholtz_continuum_factor(0.1);
  double err = 0, cont = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    err = std::max(err, std::abs(t.s.get(i)(0, 0) - oracle[i]));
    cont = std::max(cont, std::abs(t.s.get(i)(0, 0) - factor * psi[i]));
  }
  o.require(t.status == SolveStatus::kConverged, "rank-1 solve");
  o.require(err <= 1e-6, "discrete oracle");
  o.require(cont <= 1e-6, "continuum oracle");

  // Rank 2 after normalization: tr s = 0, so det h stays 1.
  const TwistedBundle E = build_trivial_bundle(tw, 2);
  const MetricField K0 = build_compatible_metric(E, [&](int, std::size_t i) {
    CMat m = identity(2);
    m(0, 0) = std::exp(psi[i]);
    return m;
  });
  auto P2 = std::make_shared<const PerturbedProblem>(normalize_background(K0, E, geom), E, geom);
  const SolverTrace t2 = solve_perturbed(*P2, opt);
  keep_converged("det-drift", P2, t2, opt.residual_tol);
  o.require(t2.status == SolveStatus::kConverged, "rank-2 solve");
  o.require(t2.det_drift <= 1e-8, "det drift");
  o.detail << "sup |s - oracle| " << err << " (continuum " << cont << "), det drift " << t2.det_drift;
}

void criterion4(Outcome& o) {
  const CoverPtr cover = std::make_shared<const ChartCover>(make_grid(1, 32), std::vector<int>{0, 1});
  const TwistPtr tw = build_clock_shift_twist(cover, 2);
  const TwistedBundle E = build_clock_shift_bundle(tw, 2);
  SolverOptions opt;
  opt.residual_tol = 1e-12;
  auto P = std::make_shared<const PerturbedProblem>(reference_metric(E), E, TorusGeometry::flat(cover->grid()));
  const SolverTrace t = solve_perturbed(*P, opt);
  keep_converged("clock-shift", P, t, opt.residual_tol);
  o.require(!is_mu_r_coboundary(*tw, 2), "twist nontrivial");
  o.require(t.status == SolveStatus::kConverged, "converged");
  o.require(t.residual <= 1e-12, "residual");
  o.require(t.max_log_h <= 1e-12, "h = Id");
  o.detail << "residual " << t.residual << ", sup |log h| " << t.max_log_h;
}

const std::vector<double> kSchedule{0.3, 0.1, 0.03, 0.01};

struct SplitRun {
  testing::ThetaSetup T;
  TwistedBundle E;
  std::shared_ptr<const PerturbedProblem> P;
  std::vector<SolverTrace> traces;
  double residual_tol = 1e-9;
  SplitRun(int d1, int d2, const std::string& seed) : E(T.split(d1, d2)) {
    const MetricField K = normalize_background(build_metric(seed, E), E, T.geom);
    P = std::make_shared<const PerturbedProblem>(K, E, T.geom);
    SolverOptions opt;
    opt.residual_tol = residual_tol;
    traces = epsilon_sweep(*P, kSchedule, opt);
  }
};
std::unique_ptr<SplitRun> g_unstable;

void criterion5(Outcome& o) {
  SplitRun run(1, 1, "herm:0.3*cosx,-0.2*cosy,0.2*sinx,0.2*cosy");
  for (const auto& t : run.traces) keep_converged("semistable", run.P, t, run.residual_tol);
  o.detail << "phi residuals";
  for (std::size_t k = 0; k < run.traces.size(); ++k) {
    const auto& t = run.traces[k];
    o.require(t.error.empty(), "solve at eps " + fmt(t.epsilon));
    o.detail << " " << t.phi_residual;
    if (k > 0) o.require(t.phi_residual <= 0.7 * 1.1 * run.traces[k - 1].phi_residual, "ratio at eps " + fmt(t.epsilon));
  }
  o.require(run.traces.back().phi_residual <= 0.02, "final residual");
}

void criterion6(Outcome& o) {
  g_unstable = std::make_unique<SplitRun>(1, -1, "diag:0.3*cosx,-0.2*cosy");
  const auto& tr = g_unstable->traces;
  for (const auto& t : tr) keep_converged("unstable", g_unstable->P, t, g_unstable->residual_tol);
  double min_phi = INFINITY, min_slack = INFINITY;
  for (const auto& t : tr) {
    o.require(t.error.empty(), "solve at eps " + fmt(t.epsilon));
    min_phi = std::min(min_phi, t.phi_residual);
    min_slack = std::min(min_slack, t.lemma31_bound_slack);
  }
  const double growth = tr.back().max_log_h / tr.front().max_log_h;
  o.require(min_phi > 0.1, "plateau");
  o.require(growth >= 3.0, "log h growth");
  o.require(min_slack >= 0.0, "sup bound slack");
  o.detail << "min phi residual " << min_phi << ", sup|log h| growth " << growth << "x, min bound slack "
           << min_slack;
}

void criterion7(Outcome& o) {
  double worst_ratio = 0, worst_point = 0;
  for (const auto& c : g_converged) {
    const Grid& g = *c.problem->background().grid();
    const double h2 = g.h() * g.h();
    const double budget = std::max(10 * h2, 10 * c.residual_tol * c.problem->geometry().volume());
    const Lemma32Report l = check_lemma32(*c.problem, c.s, c.eps, c.residual_tol, 100);
    worst_ratio = std::max(worst_ratio, l.defect / budget);
    worst_point = std::max(worst_point, l.pointwise_defect / (10 * h2));
    o.require(l.defect <= budget, c.label + " identity at eps " + fmt(c.eps));
    o.require(l.pointwise_defect <= 10 * h2, c.label + " pointwise at eps " + fmt(c.eps));
  }
  o.require(!g_converged.empty(), "no converged solves");
  o.detail << g_converged.size() << " solves, worst defect/budget " << worst_ratio << ", worst pointwise/tol "
           << worst_point;
}

void criterion8(Outcome& o) {
  if (!g_unstable) g_unstable = std::make_unique<SplitRun>(1, -1, "diag:0.3*cosx,-0.2*cosy");
  const SplitRun& run = *g_unstable;
  const MetricField& K = run.P->background();
  const SubbundleCandidate factor = factor_candidate(K, run.E, 0);
  const ProbeReport r = uy_probe(run.traces.back().s, K, run.E, run.T.geom, {}, &factor.projector);
  o.require(r.conclusive, "conclusive");
  o.require(r.projectors.size() == 1, "one projector");
  if (!o.pass) {
    o.detail << r.reason;
    return;
  }
  const ProbeProjector& p = r.projectors[0];
  const double angle = p.principal_angle.value_or(INFINITY);
  o.require(angle <= 0.1, "principal angle");
  o.require(std::abs(p.degree - 1.0) <= 0.05, "degree");
  o.require(r.nu_weighted < -0.5, "nu");
  o.detail << "angle " << angle << ", deg " << p.degree << ", nu " << r.nu_weighted << " (margin form "
           << r.nu_margins << ")";
}

void criterion9(Outcome& o) {
  const GridPtr grid = make_grid(2, 32);
  const CoverPtr cover = std::make_shared<const ChartCover>(grid, std::vector<int>{1, 3});
  const TwistPtr tw = build_trivial_twist(cover);
  const TorusGeometry geom = TorusGeometry::flat(grid);
  const double tol = differential_tol(grid->h());
  const TwistedBundle L = build_theta_bundle(tw, 1, 1);
  const TwistedBundle LL = direct_sum({L, L});
  const TwistedBundle LLi = direct_sum({L, build_theta_bundle(tw, -1, -1)});
  // Split Chern algebra for bidegree (1, 1): c1(L)^2 = 2, so 2 c2 - c1^2 / 2 = -2 c1(L)^2 = -4.
  const double expected = -4.0;
  const double b0 = bogomolov_number(reference_metric(LL), LL, geom);
  const double b1 = bogomolov_number(reference_metric(LLi), LLi, geom);
  const double d0 = bogomolov_decomposition(reference_metric(LL), LL, geom).defect();
  const double d1 = bogomolov_decomposition(reference_metric(LLi), LLi, geom).defect();
  o.require(std::abs(b0) <= tol, "L+L number");
  o.require(b1 < 0 && std::abs(b1 - expected) <= 0.05 * std::abs(expected), "L+L^-1 number");
  o.require(d0 <= tol && d1 <= tol, "decomposition");
  o.detail << "L+L " << b0 << ", L+L^-1 " << b1 << " (expected " << expected << "), decomposition defects " << d0
           << ", " << d1;
}

void criterion10(Outcome& o) {
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, -1);
  const double tol = differential_tol(T.grid->h());
  double worst = -INFINITY;
  for (int k = 0; k < 20; ++k) {
    const std::string s = std::to_string(100 + k);
    const std::string seed = "herm:0.4*rand" + s + "1,0.4*rand" + s + "2,0.2*rand" + s + "3,0.2*rand" + s + "4";
    const MetricField H = build_metric(seed, E);
    const RealField phi = ScalarExpr::parse("0.5*rand" + s + "5").sample(T.grid);
    const ConformalBound b = conformal_residual_bound_check(H, E, T.geom, phi);
    worst = std::max(worst, b.lhs - b.rhs);
    o.require(b.lhs <= b.rhs + tol, "pair " + std::to_string(k));
  }
  o.detail << "20 pairs, max lhs - rhs " << worst << " (tol " << tol << ")";
}

}  // namespace
}  // namespace twhe

int main() {
  using namespace twhe;
  const std::vector<Criterion> criteria{
      {1, "cech-validation", 5, criterion1},
      {2, "chern-weil-calibration", 10, criterion2},
      {3, "helmholtz-oracle", 30, criterion3},
      {4, "twisted-fixed-point", 5, criterion4},
      {5, "semistable-trend", 180, criterion5},
      {6, "unstable-dichotomy", 180, criterion6},
      {7, "energy-identity", 0, criterion7},
      {8, "destabilizing-probe", 30, criterion8},
      {9, "bogomolov", 120, criterion9},
      {10, "conformal-bound", 60, criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    o.detail.precision(3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Criterion 7 reuses earlier solves; its budget is covered by theirs.
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail << " [fail: runtime over " << c.budget_s << " s]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %-24s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
