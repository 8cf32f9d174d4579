// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Details follow each verdict, indented.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eqod/bench.hpp"
#include "eqod/pipeline.hpp"
#include "eqod/rng.hpp"
#include "eqod/solvers.hpp"
#include "eqod/sparse.hpp"
#include "eqod/stability.hpp"
#include "oracles.hpp"

using namespace eqod;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Options {
  int threads = 0;
  std::string report;
};

void save(const Options& opt, const std::string& name, const std::function<void(std::ostream&)>& fn) {
  if (opt.report.empty()) return;
  std::filesystem::create_directories(opt.report);
  std::ofstream out(std::filesystem::path(opt.report) / name);
  fn(out);
}

const CellResult* find_cell(const std::vector<CellResult>& cells, Pde p, double noise, Method m) {
  for (const auto& c : cells)
    if (c.pde == p && c.method == m && std::abs(c.noise - noise) < 1e-12) return &c;
  return nullptr;
}

std::string cell_text(const CellResult& c) {
  return std::string(pde_spec(c.pde).name) + " " + fmt(100 * c.noise, 0) + "% " + std::string(method_name(c.method)) +
         ": F1 " + fmt(c.f1_mean) + " +- " + fmt(c.f1_std) + ", fallbacks " + std::to_string(c.fallback_count) +
         ", mean |L| " + fmt(c.mean_library_size, 1);
}

BenchmarkResult bench(const Options& opt, std::vector<Pde> pdes, std::vector<double> noise, std::vector<Method> methods) {
  BenchmarkPlan plan;
  plan.pdes = std::move(pdes);
  plan.noise_levels = std::move(noise);
  plan.methods = std::move(methods);
  plan.threads = opt.threads;
  return run_benchmark(plan);
}

Verdict clean_identification(const Options& opt) {
  Verdict v;
  const auto t0 = Clock::now();
  BenchmarkPlan plan;
  plan.pdes = {Pde::heat, Pde::burgers, Pde::kdv, Pde::adv_diff, Pde::ks, Pde::react_diff};
  plan.noise_levels = {0.0};
  plan.seeds = {42};
  plan.methods = {Method::eqod};
  plan.threads = opt.threads;
  const BenchmarkResult r = run_benchmark(plan);
  const double secs = seconds_since(t0);
  for (const auto& t : r.trials) {
    const std::string name(pde_spec(t.pde).name);
    v.check(t.error.empty() && t.f1 == 1.0, name + " F1 " + fmt(t.f1) + " support {" + t.support + "}" +
                                                (t.error.empty() ? "" : " error: " + t.error));
    v.check(t.ce <= 1e-2, name + " coefficient error " + sci(t.ce) + " <= 1e-2");
  }
  v.check(secs <= 30.0, "runtime " + fmt(secs, 1) + " s <= 30 s");
  save(opt, "c1_trials.csv", [&](std::ostream& o) { write_trials_csv(o, r.trials); });
  return v;
}

Verdict galilean_sweep(const Options& opt) {
  Verdict v;
  const auto t0 = Clock::now();
  SweepPlan plan;
  plan.threads = opt.threads;
  const ThresholdSweep s = run_threshold_sweep(plan);
  const double secs = seconds_since(t0);
  v.check(s.cases.size() == 75, std::to_string(s.cases.size()) + " cases");
  const ThresholdRow a = score_threshold(s.cases, 0.05);
  const ThresholdRow lo = score_threshold(s.cases, 0.01);
  const ThresholdRow hi = score_threshold(s.cases, 0.20);
  v.check(a.precision == 1.0 && a.recall == 1.0,
          "tau 0.05: precision " + fmt(a.precision) + " recall " + fmt(a.recall) + " (tp " + std::to_string(a.tp) +
              " fp " + std::to_string(a.fp) + " fn " + std::to_string(a.fn) + ")");
  v.check(lo.precision < 1.0, "tau 0.01: precision " + fmt(lo.precision) + " < 1");
  v.check(hi.recall < 1.0, "tau 0.20: recall " + fmt(hi.recall) + " < 1");
  std::map<std::string, int> fp_by_pde;
  for (const auto& c : s.cases)
    if (!c.truth && c.error.empty() && c.energy_fraction > 0.05 && std::abs(c.c1) > 0.05)
      ++fp_by_pde[std::string(pde_spec(c.pde).name)];
  for (const auto& [name, n] : fp_by_pde) v.note("false positives at 0.05: " + name + " x" + std::to_string(n));
  v.check(secs <= 300.0, "runtime " + fmt(secs, 1) + " s <= 300 s");
  save(opt, "c2_sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, s); });
  save(opt, "c2_cases.csv", [&](std::ostream& o) { write_sweep_cases_csv(o, s); });
  return v;
}

Verdict heat_robustness(const Options& opt) {
  Verdict v;
  const auto t0 = Clock::now();
  const BenchmarkResult r = bench(opt, {Pde::heat}, {0.05, 0.10, 0.20}, {Method::eqod, Method::wf_lasso});
  const double secs = seconds_since(t0);
  for (double n : {0.05, 0.10, 0.20}) {
    const CellResult* c = find_cell(r.cells, Pde::heat, n, Method::eqod);
    v.check(c && c->f1_mean == 1.0 && c->f1_std == 0.0, c ? cell_text(*c) : "missing cell");
  }
  const CellResult* w = find_cell(r.cells, Pde::heat, 0.20, Method::wf_lasso);
  v.check(w && w->f1_mean >= 0.30 && w->f1_mean <= 0.65,
          (w ? cell_text(*w) : std::string("missing cell")) + ", target [0.30, 0.65]");
  for (const auto& t : r.trials)
    if (t.method == Method::eqod && t.f1 < 1.0)
      v.note("seed " + std::to_string(t.seed) + " at " + fmt(100 * t.noise, 0) + "%: " + std::string(mode_name(t.mode)) +
             (t.fallback ? " (fallback, ratio " + fmt(t.residual_ratio, 4) + ")" : "") + " {" + t.support + "}");
  v.check(secs <= 180.0, "runtime " + fmt(secs, 1) + " s <= 180 s");
  save(opt, "c3_trials.csv", [&](std::ostream& o) { write_trials_csv(o, r.trials); });
  return v;
}

Verdict burgers_symmetry(const Options& opt) {
  Verdict v;
  const BenchmarkResult r = bench(opt, {Pde::burgers}, {0.0, 0.05, 0.10, 0.20}, {Method::eqod});
  for (double n : {0.0, 0.05, 0.10, 0.20}) {
    const CellResult* c = find_cell(r.cells, Pde::burgers, n, Method::eqod);
    if (!c) {
      v.check(false, "missing cell");
      continue;
    }
    const int sym = c->mode_histogram.count(SelectionMode::symmetry) ? c->mode_histogram.at(SelectionMode::symmetry) : 0;
    v.check(sym == c->trials && c->mean_library_size == 6.0,
            fmt(100 * n, 0) + "%: symmetry " + std::to_string(sym) + "/" + std::to_string(c->trials) +
                ", mean |L| " + fmt(c->mean_library_size, 2));
  }
  const CellResult* c = find_cell(r.cells, Pde::burgers, 0.20, Method::eqod);
  v.check(c && c->f1_mean >= 0.85, "20%: F1 " + (c ? fmt(c->f1_mean) : std::string("?")) + " >= 0.85");
  save(opt, "c4_trials.csv", [&](std::ostream& o) { write_trials_csv(o, r.trials); });
  return v;
}

Verdict stability_profile(const Options&) {
  Verdict v;
  const LibrarySpec lib = standard_library();
  const auto pi_of = [&](const StabilityGate& g, const Term& t) { return g.selection.pi[*lib.index_of(t)]; };
  const auto profile = [&](const StabilityGate& g) {
    std::string s;
    for (std::size_t j = 0; j < lib.size(); ++j) s += lib[j].name() + "=" + fmt(g.selection.pi[j], 2) + " ";
    return s;
  };

  const auto heat = generate_set(pde_spec(Pde::heat), default_grid(Pde::heat), 3, 0.10, 42);
  const StabilityGate gh = stability_gate(heat, lib, 42);
  v.check(pi_of(gh, terms::u_xx) >= 0.95, "Heat 10%: pi(u_xx) " + fmt(pi_of(gh, terms::u_xx), 2) + " >= 0.95");
  double other = 0.0;
  for (std::size_t j = 0; j < lib.size(); ++j)
    if (lib[j] != terms::u_xx) other = std::max(other, gh.selection.pi[j]);
  v.check(other <= 0.45, "Heat 10%: max other pi " + fmt(other, 2) + " <= 0.45");
  v.note("Heat 10%: " + profile(gh));

  const auto rd = generate_set(pde_spec(Pde::react_diff), default_grid(Pde::react_diff), 3, 0.05, 42);
  const StabilityGate gr = stability_gate(rd, lib, 42);
  for (const Term& t : {terms::u, terms::u3, terms::u_xx})
    v.check(pi_of(gr, t) >= 0.9, "React-Diff 5%: pi(" + t.name() + ") " + fmt(pi_of(gr, t), 2) + " >= 0.9");
  v.check(pi_of(gr, terms::u2) <= 0.45, "React-Diff 5%: pi(u^2) " + fmt(pi_of(gr, terms::u2), 2) + " <= 0.45");
  v.note("React-Diff 5%: " + profile(gr));
  return v;
}

Verdict fallback_behavior(const Options& opt) {
  Verdict v;
  const BenchmarkResult r = bench(opt, {Pde::kdv_burgers}, {0.10, 0.20}, {Method::eqod, Method::wf_lasso});
  for (double n : {0.10, 0.20}) {
    int triggered = 0;
    bool agree = true;
    std::string ratios;
    for (const auto& t : r.trials) {
      if (t.method != Method::eqod || std::abs(t.noise - n) > 1e-12) continue;
      ratios += fmt(t.residual_ratio, 3) + " ";
      if (!t.fallback) continue;
      ++triggered;
      for (const auto& w : r.trials)
        if (w.method == Method::wf_lasso && w.seed == t.seed && std::abs(w.noise - n) < 1e-12 && w.f1 != t.f1)
          agree = false;
    }
    v.check(triggered >= 5, fmt(100 * n, 0) + "%: fallback on " + std::to_string(triggered) + "/10 seeds (need >= 5)");
    v.check(agree, fmt(100 * n, 0) + "%: triggered seeds match WF-LASSO F1");
    v.note(fmt(100 * n, 0) + "% residual ratios: " + ratios);
  }
  save(opt, "c6_trials.csv", [&](std::ostream& o) { write_trials_csv(o, r.trials); });
  return v;
}

Verdict library_scaling(const Options& opt) {
  Verdict v;
  AblationPlan plan;
  plan.kind = AblationKind::library_scaling;
  plan.threads = opt.threads;
  const AblationResult r = run_ablation(plan);
  std::map<std::pair<Pde, Method>, std::map<int, const CellResult*>> by;
  for (const auto& row : r.rows) by[{row.cell.pde, row.cell.method}][row.value] = &row.cell;
  for (Pde p : {Pde::burgers, Pde::heat}) {
    std::string line;
    bool ok = true;
    for (const auto& [size, c] : by[{p, Method::eqod}]) {
      ok = ok && c->f1_mean == 1.0 && c->f1_std == 0.0;
      line += std::to_string(size) + ":" + fmt(c->f1_mean) + " ";
    }
    v.check(ok && by[{p, Method::eqod}].size() == 5, std::string(pde_spec(p).name) + " EqOD F1 by size " + line);
    const auto& w = by[{p, Method::wf_lasso}];
    if (w.count(10) && w.count(30))
      v.check(w.at(30)->f1_mean <= w.at(10)->f1_mean, std::string(pde_spec(p).name) + " WF-LASSO F1 size 30 " +
                                                          fmt(w.at(30)->f1_mean) + " <= size 10 " + fmt(w.at(10)->f1_mean));
    else
      v.check(false, std::string(pde_spec(p).name) + " WF-LASSO cells missing");
  }
  double pooled10 = 0.0, pooled30 = 0.0;
  for (Pde p : {Pde::burgers, Pde::heat}) {
    const auto& w = by[{p, Method::wf_lasso}];
    if (w.count(10) && w.count(30)) {
      pooled10 += w.at(10)->f1_mean / 2;
      pooled30 += w.at(30)->f1_mean / 2;
    }
  }
  v.note("WF-LASSO pooled over both PDEs: size 30 " + fmt(pooled30) + ", size 10 " + fmt(pooled10));
  save(opt, "c7_ablation.csv", [&](std::ostream& o) { write_ablation_csv(o, r); });
  return v;
}

Verdict property_suite(const Options&) {
  Verdict v;
  using namespace oracle;

  double spec_err = 0.0;
  for (double L : {2 * kPi, 32 * kPi, 5.0}) {
    const TrigSum f{L, {1, 3, 7, 20}, {1.0, -0.5, 0.25, 0.01}, {0.1, 1.3, -0.7, 2.0}};
    for (int order = 1; order <= 4; ++order) spec_err = std::max(spec_err, spectral_error(f, 64, order));
  }
  v.check(spec_err < 1e-10, "spectral derivatives, orders 1-4: relative error " + sci(spec_err) + " < 1e-10");

  const QuadratureErrors q = quadrature_vs_refined(Grid1D{0.0, 2 * kPi, 128, 0.0, 1.0, 128});
  const double qmax = std::max({q.u, q.u_xx, q.u_u_x, q.b});
  v.check(qmax < 1e-3, "weak-form quadrature vs 4x-refined oracle: " + sci(qmax) + " < 1e-3");

  double kkt = 0.0;
  RngStream rng(77, 1);
  for (double corr : {0.0, 0.8}) {
    Eigen::MatrixXd X(80, 10);
    Eigen::VectorXd common(80);
    for (int i = 0; i < 80; ++i) common(i) = rng.normal();
    for (int i = 0; i < 80; ++i)
      for (int j = 0; j < 10; ++j) X(i, j) = rng.normal() + corr * common(i);
    const NormalizedSystem ns = normalize(X, 1.5 * X.col(2) - 0.4 * X.col(7) + Eigen::VectorXd::Constant(80, 0.05));
    for (double lambda : {1e-5, 1e-3, 1e-2, 0.1, 0.5})
      kkt = std::max(kkt, kkt_violation(ns.theta, ns.b, lasso(ns.theta, ns.b, lambda, 1e-12, 100000).xi, lambda));
  }
  v.check(kkt < 1e-6, "LASSO KKT residual " + sci(kkt) + " < 1e-6");

  {
    const Grid1D g = default_grid(Pde::heat);
    const auto set = generate_set(pde_spec(Pde::heat), g, 3, 0.1, 42);
    const WeakSystem sys = assemble(set, standard_library(), make_test_grid(g, 8, 10));
    StabilityConfig cfg;
    cfg.threads = 1;
    const auto ref = stability_select(sys.theta, sys.b, cfg, 42).pi;
    bool same = true;
    for (int t : {2, 4, 8}) {
      cfg.threads = t;
      same = same && stability_select(sys.theta, sys.b, cfg, 42).pi == ref;
    }
    v.check(same, "stability selection identical for 1, 2, 4, 8 workers");
  }

  {
    const auto set = generate_set(pde_spec(Pde::burgers), default_grid(Pde::burgers), 3, 0.0, 42);
    std::vector<Trajectory> boosted;
    for (const auto& t : set) boosted.push_back(galilean_boost(t, 0.5));
    const IdentificationResult a = run_eqod(set, 42);
    const IdentificationResult b = run_eqod(TrajectorySet(std::move(boosted)), 42);
    double diff = 0.0;
    for (const auto& t : standard_terms()) diff = std::max(diff, std::abs(a.coeffs.get(t) - b.coeffs.get(t)));
    v.check(diff < 5e-2, "Burgers coefficients under boost c = 0.5: max change " + sci(diff) + " < 5e-2");
  }

  {
    const auto& lib = standard_terms();
    const unsigned truth_mask = (1u << *standard_library().index_of(terms::u_u_x)) |
                                (1u << *standard_library().index_of(terms::u_xx));
    SupportSet truth;
    for (int j = 0; j < 10; ++j)
      if (truth_mask >> j & 1u) truth.insert(lib[j]);
    int mismatches = 0;
    for (unsigned pred_mask = 0; pred_mask < 1024; ++pred_mask) {
      SupportSet pred;
      for (int j = 0; j < 10; ++j)
        if (pred_mask >> j & 1u) pred.insert(lib[j]);
      const F1Score s = f1_score(pred, truth);
      const MaskScore m = mask_f1(pred_mask, truth_mask);
      mismatches += std::abs(s.precision - m.precision) > 1e-15 || std::abs(s.recall - m.recall) > 1e-15 ||
                    std::abs(s.f1 - m.f1) > 1e-15;
    }
    v.check(mismatches == 0, "F1 over all 1024 predicted supports: " + std::to_string(mismatches) + " mismatches");
  }
  return v;
}

Verdict known_weak_cells(const Options& opt) {
  Verdict v;
  const BenchmarkResult f = bench(opt, {Pde::fisher_kpp}, {0.0, 0.05, 0.10, 0.20}, {Method::eqod});
  for (double n : {0.0, 0.05, 0.10, 0.20}) {
    const CellResult* c = find_cell(f.cells, Pde::fisher_kpp, n, Method::eqod);
    v.check(c && c->f1_mean >= 0.3 && c->f1_mean <= 0.7,
            (c ? cell_text(*c) : std::string("missing cell")) + ", target [0.3, 0.7]");
  }
  const BenchmarkResult k = bench(opt, {Pde::kdv}, {0.20}, {Method::eqod});
  const CellResult* c = find_cell(k.cells, Pde::kdv, 0.20, Method::eqod);
  v.check(c && c->f1_mean >= 0.6, (c ? cell_text(*c) : std::string("missing cell")) + ", target >= 0.6");
  std::map<std::string, int> supports;
  for (const auto& t : k.trials) ++supports[t.support];
  for (const auto& [s, n] : supports) v.note("KdV 20% support {" + s + "} x" + std::to_string(n));
  save(opt, "c9_fisher.csv", [&](std::ostream& o) { write_trials_csv(o, f.trials); });
  save(opt, "c9_kdv.csv", [&](std::ostream& o) { write_trials_csv(o, k.trials); });
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-9"};
  Options opt;
  std::vector<int> only;
  bool verbose = true;
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
  app.add_option("--threads", opt.threads, "Worker threads, 0 for all cores");
  app.add_option("--report", opt.report, "Directory for per-criterion CSV output");
  app.add_flag("!--quiet", verbose, "Verdict lines only");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict(const Options&)>>> criteria{
      {"clean-data identification", clean_identification},
      {"Galilean detector sweep", galilean_sweep},
      {"Heat robustness", heat_robustness},
      {"Burgers symmetry path", burgers_symmetry},
      {"stability profile", stability_profile},
      {"fallback behavior", fallback_behavior},
      {"library-scaling invariance", library_scaling},
      {"property suite", property_suite},
      {"known weak cells, loose bounds", known_weak_cells},
  };
  const std::set<int> selected(only.begin(), only.end());
  int passed = 0, run = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second(opt);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    ++run;
    passed += v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << fmt(seconds_since(t0), 1) << " s)\n";
    if (verbose)
      for (const auto& l : v.lines) std::cout << "    " << l << "\n";
    std::cout.flush();
  }
  std::cout << "acceptance: " << passed << "/" << run << " PASS\n";
  return passed == run ? 0 : 1;
}
