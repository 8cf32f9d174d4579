#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqod/bench.hpp"

using namespace eqod;

namespace {

BenchmarkPlan small_plan(int threads) {
  BenchmarkPlan p;
  p.pdes = {Pde::heat, Pde::burgers};
  p.noise_levels = {0.0, 0.1};
  p.seeds = {42, 43, 44};
  p.M = 1;
  p.nx = 64;
  p.nt = 64;
  p.threads = threads;
  return p;
}

std::string csv(const BenchmarkResult& r) {
  std::ostringstream a;
  write_trials_csv(a, r.trials);
  write_cells_csv(a, r.cells);
  return a.str();
}

}  // namespace

TEST(Bench, CellsAggregateTrials) {
  const BenchmarkResult r = run_benchmark(small_plan(2));
  ASSERT_EQ(r.trials.size(), 2u * 2 * 3 * 2);
  ASSERT_EQ(r.cells.size(), 2u * 2 * 2);
  for (const CellResult& c : r.cells) {
    std::vector<double> f1;
    double ce = 0.0;
    int fallbacks = 0, finite = 0;
    for (const TrialResult& t : r.trials) {
      if (t.pde != c.pde || t.noise != c.noise || t.method != c.method) continue;
      f1.push_back(t.f1);
      fallbacks += t.fallback;
      if (std::isfinite(t.ce)) {
        ce += t.ce;
        ++finite;
      }
    }
    ASSERT_EQ(c.trials, 3);
    ASSERT_EQ(f1.size(), 3u);
    const double mean = (f1[0] + f1[1] + f1[2]) / 3;
    double ss = 0.0;
    for (double v : f1) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(c.f1_mean, mean, 1e-15);
    EXPECT_NEAR(c.f1_std, std::sqrt(ss / 2), 1e-15);
    EXPECT_NEAR(c.ce_mean, ce / finite, 1e-15);
    EXPECT_EQ(c.fallback_count, fallbacks);
    int modes = 0;
    for (const auto& [m, n] : c.mode_histogram) modes += n;
    EXPECT_EQ(modes, 3);
  }
}

TEST(Bench, TrialMatchesDirectRun) {
  const BenchmarkResult r = run_benchmark(small_plan(1));
  const TrialResult& t = r.trials.front();
  const PdeSpec spec = pde_spec(t.pde);
  const auto set = generate_set(spec, default_grid(t.pde, 64, 64), 1, t.noise, t.seed);
  const IdentificationResult id = t.method == Method::eqod ? run_eqod(set, t.seed) : run_wf_lasso_baseline(set, t.seed);
  EXPECT_EQ(t.f1, f1_score(id.support(), spec.true_support()).f1);
  EXPECT_EQ(t.ce, coefficient_error(id.coeffs, spec.true_coeffs));
}

TEST(Bench, OutputIsIndependentOfThreads) {
  EXPECT_EQ(csv(run_benchmark(small_plan(1))), csv(run_benchmark(small_plan(3))));
}

TEST(Bench, SingleTrialHasZeroStd) {
  TrialResult t;
  t.f1 = 0.5;
  t.ce = 0.1;
  const auto cells = aggregate({t});
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].f1_std, 0.0);
  EXPECT_EQ(cells[0].f1_mean, 0.5);
}

TEST(Bench, PlanValidation) {
  BenchmarkPlan p = small_plan(1);
  p.seeds.clear();
  EXPECT_ANY_THROW(p.validate());
  p = small_plan(1);
  p.M = 0;
  EXPECT_ANY_THROW(p.validate());
  p = small_plan(1);
  p.noise_levels = {-0.1};
  EXPECT_ANY_THROW(p.validate());
}

TEST(Sweep, ScoresConfusionCounts) {
  std::vector<GalileanCase> cases;
  auto add = [&](bool truth, double f, double c1, std::string err = {}) {
    GalileanCase c;
    c.truth = truth;
    c.energy_fraction = f;
    c.c1 = c1;
    c.error = std::move(err);
    cases.push_back(c);
  };
  add(true, 0.6, -1.0);
  add(true, 0.03, -1.0);
  add(false, 0.1, 0.01);
  add(false, 0.2, 0.5);
  add(false, 0.9, 0.9, "failed");
  add(true, 0.9, 0.9, "failed");
  const ThresholdRow r = score_threshold(cases, 0.05);
  EXPECT_EQ(r.tp, 1);
  EXPECT_EQ(r.fn, 2);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.tn, 2);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0 / 3);
  const ThresholdRow low = score_threshold(cases, 1e-6);
  EXPECT_EQ(low.tp, 2);
  EXPECT_EQ(low.fn, 1);
}

TEST(Sweep, SmallGridIsMonotoneInTau) {
  SweepPlan p;
  p.taus = {1e-6, 0.05, 0.5};
  p.noise_levels = {0.0};
  p.seeds = {42};
  p.negatives = {Pde::heat};
  p.M = 2;
  p.nx = 64;
  p.nt = 64;
  const ThresholdSweep s = run_threshold_sweep(p);
  ASSERT_EQ(s.cases.size(), 3u);
  ASSERT_EQ(s.rows.size(), 3u);
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    EXPECT_LE(s.rows[i].tp, s.rows[i - 1].tp);
    EXPECT_LE(s.rows[i].fp, s.rows[i - 1].fp);
  }
  EXPECT_EQ(s.rows[0].recall, 1.0);
  std::ostringstream out;
  write_sweep_csv(out, s);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Ablation, NamesRoundTrip) {
  for (AblationKind k : {AblationKind::trajectories, AblationKind::resolution, AblationKind::library_scaling})
    EXPECT_EQ(parse_ablation(ablation_name(k)), k);
  EXPECT_FALSE(parse_ablation("depth").has_value());
  EXPECT_EQ(parse_method("wf-lasso"), Method::wf_lasso);
  EXPECT_EQ(method_name(Method::eqod), "eqod");
}

TEST(Svg, StabilityBarsAreWellFormed) {
  std::ostringstream out;
  write_stability_svg(out, {"u_xx", "u"}, {0.9, 0.1}, 0.5);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("u_xx"), std::string::npos);
}
