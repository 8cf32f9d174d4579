#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "eqod/pipeline.hpp"
#include "eqod/solvers.hpp"

namespace eqod {

enum class Method { eqod, wf_lasso };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct BenchmarkPlan {
  std::vector<Pde> pdes = all_pdes();
  std::vector<double> noise_levels{0.0, 0.05, 0.10, 0.20};
  std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46, 47, 48, 49, 50, 51};
  int M = 3;
  int nx = 128;
  int nt = 128;
  std::vector<Method> methods{Method::eqod, Method::wf_lasso};
  /// 0 picks std::thread::hardware_concurrency().
  int threads = 0;
  PipelineConfig config;
  SolverOptions solver;

  void validate() const;
};

/// One (pde, noise, seed, method) run.
struct TrialResult {
  Pde pde = Pde::heat;
  double noise = 0.0;
  Method method = Method::eqod;
  std::uint64_t seed = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ce = 0.0;
  SelectionMode mode = SelectionMode::baseline;
  bool fallback = false;
  std::size_t library_size = 0;
  double residual_ratio = 0.0;
  double seconds = 0.0;
  std::string support;  // ';'-joined term names
  std::string error;    // empty on success
};

struct CellResult {
  Pde pde = Pde::heat;
  double noise = 0.0;
  Method method = Method::eqod;
  int trials = 0;
  double f1_mean = 0.0;
  double f1_std = 0.0;  // sample standard deviation, 0 for a single trial
  double ce_mean = 0.0;
  std::map<SelectionMode, int> mode_histogram;
  int fallback_count = 0;
  double mean_library_size = 0.0;
};

struct BenchmarkResult {
  std::vector<TrialResult> trials;  // sorted by (pde, noise, method, seed)
  std::vector<CellResult> cells;    // sorted by (pde, noise, method)
};

/// Clean sets are solved once per (pde, seed) and noised per level with the
/// same streams generate_set uses, so every trial equals a direct
/// generate_set + identify run. Failed trials score F1 = 0 with the error.
BenchmarkResult run_benchmark(const BenchmarkPlan& plan);

std::vector<CellResult> aggregate(const std::vector<TrialResult>& trials);

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells);
/// F1 against noise, one polyline per (pde, method).
void write_f1_svg(std::ostream& out, const std::vector<CellResult>& cells);

struct GalileanCase {
  Pde pde = Pde::heat;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool truth = false;
  double energy_fraction = 0.0;
  double c1 = 0.0;
  std::string error;
};

struct ThresholdRow {
  double tau = 0.0;
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ThresholdSweep {
  std::vector<GalileanCase> cases;
  std::vector<ThresholdRow> rows;
};

struct SweepPlan {
  std::vector<double> taus{1e-6, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  std::vector<Pde> positives{Pde::burgers, Pde::kdv};
  std::vector<Pde> negatives{Pde::heat, Pde::fisher_kpp, Pde::adv_diff};
  std::vector<double> noise_levels{0.0, 0.05, 0.10};
  std::vector<std::uint64_t> seeds{42, 43, 44, 45, 46};
  int M = 3;
  int nx = 128;
  int nt = 128;
  int threads = 0;
  SymmetryThresholds thresholds;
};

/// Galilean-detector precision/recall over the case grid. A case is
/// predicted positive at tau iff f > tau and |c1| > tau; a case whose
/// detector failed counts as predicted negative.
ThresholdSweep run_threshold_sweep(const SweepPlan& plan);
ThresholdRow score_threshold(const std::vector<GalileanCase>& cases, double tau);

void write_sweep_csv(std::ostream& out, const ThresholdSweep& sweep);
void write_sweep_cases_csv(std::ostream& out, const ThresholdSweep& sweep);

enum class AblationKind { trajectories, resolution, library_scaling };

std::string_view ablation_name(AblationKind k);
std::optional<AblationKind> parse_ablation(std::string_view name);

struct AblationPlan {
  AblationKind kind = AblationKind::trajectories;
  /// M values, nx values or library sizes; empty selects the defaults
  /// {1,2,3,5,10}, {32,64,128,256} and {10,15,20,25,30}.
  std::vector<int> values;
  /// Empty selects 42..51 (trajectories) or 42..46 (resolution, scaling).
  std::vector<std::uint64_t> seeds;
  int threads = 0;
};

struct AblationRow {
  int value = 0;
  CellResult cell;
};

struct AblationResult {
  AblationKind kind = AblationKind::trajectories;
  std::vector<AblationRow> rows;
  std::vector<TrialResult> trials;
};

/// trajectories: Burgers 10%, EqOD, M swept.
/// resolution: Burgers clean, EqOD, nx swept at nt = 128.
/// library_scaling: Burgers 5% and Heat 10%, both methods, library size swept.
AblationResult run_ablation(const AblationPlan& plan);

void write_ablation_csv(std::ostream& out, const AblationResult& result);

/// term,probability bars.
void write_stability_svg(std::ostream& out, const std::vector<std::string>& terms,
                         const std::vector<double>& pi, double threshold);

}  // namespace eqod
