#include "eqod/pipeline.hpp"

#include <cmath>
#include <limits>

#include "eqod/error.hpp"

namespace eqod {

std::string_view mode_name(SelectionMode m) {
  switch (m) {
    case SelectionMode::symmetry: return "symmetry";
    case SelectionMode::stability: return "stability";
    case SelectionMode::baseline: return "baseline";
  }
  return "baseline";
}

namespace {

double residual_sq(const WeakSystem& sys, const CoefficientVector& c) {
  Eigen::VectorXd xi(sys.cols());
  for (Eigen::Index j = 0; j < sys.cols(); ++j) xi(j) = c.get(sys.spec[static_cast<std::size_t>(j)]);
  return (sys.b - sys.theta * xi).squaredNorm();
}

double ratio(double reduced, double full) {
  if (full > 0.0) return reduced / full;
  return reduced == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

IdentificationResult run_wf_lasso_baseline(const TrajectorySet& trajset, std::uint64_t seed,
                                           const PipelineConfig& config) {
  const LibrarySpec full = config.base_library();
  const auto s3 = wf_lasso_identify(trajset, full, seed, config.lasso, config.identify);
  IdentificationResult r;
  r.coeffs = s3.coeffs;
  r.mode = SelectionMode::baseline;
  r.library_used = full;
  r.library_size = full.size();
  r.residual_ratio = std::numeric_limits<double>::quiet_NaN();
  r.lambda_star = s3.cv.lambda_star;
  return r;
}

IdentificationResult run_eqod(const TrajectorySet& trajset, std::uint64_t seed,
                              const PipelineConfig& config) {
  const LibrarySpec full = config.base_library();
  IdentificationResult r;
  r.library_used = full;

  // Stage 1.
  r.symmetry_report = detect_all(trajset, config.symmetry);
  const SymmetryReport& rep = *r.symmetry_report;
  const bool odd = rep.reflection_odd.detected;

  // Stage 3 on the full library doubles as the Stage-4 comparator, and its
  // weak system provides the shared rows for both residuals.
  const TestGrid tg = make_test_grid(trajset.grid(), config.identify.test_nt, config.identify.test_nx);
  const WeakSystem full_sys = assemble(trajset, full, tg);
  const StageThreeResult full_fit = identify_system(full_sys, seed, config.lasso, config.identify);

  auto use_full = [&](const std::string& why) {
    r.coeffs = full_fit.coeffs;
    r.library_used = full;
    r.lambda_star = full_fit.cv.lambda_star;
    r.fallback_triggered = true;
    if (!why.empty()) r.diagnostics.push_back(why);
  };

  try {
    // Stage 2.
    LibrarySpec reduced = full;
    if (rep.galilean.detected) {
      r.mode = SelectionMode::symmetry;
      reduced = odd ? odd_reflection_prune(galilean_reduced()) : galilean_reduced();
    } else {
      r.mode = SelectionMode::stability;
      const LibrarySpec base = odd ? odd_reflection_prune(full) : full;
      StabilityGate gate = stability_gate(trajset, base, seed, config.stability);
      if (gate.empty_fallback) r.diagnostics.push_back("stability selection kept no term; using the base library");
      reduced = gate.library;
      r.stability = std::move(gate.selection);
    }
    r.library_size = reduced.size();

    // Stage 3 on the reduced library, same test grid and rows.
    const WeakSystem red_sys = full_sys.restricted_to(reduced);
    const StageThreeResult red_fit = identify_system(red_sys, seed, config.lasso, config.identify);

    // Stage 4.
    r.residual_ratio = ratio(residual_sq(red_sys, red_fit.coeffs), residual_sq(full_sys, full_fit.coeffs));
    const double gamma = r.mode == SelectionMode::symmetry ? config.gamma_symmetry : config.gamma_stability;
    if (r.residual_ratio > gamma) {
      use_full("");
    } else {
      r.coeffs = red_fit.coeffs.expressed_over(full.terms());
      r.library_used = reduced;
      r.lambda_star = red_fit.cv.lambda_star;
    }
  } catch (const Error& e) {
    if (r.library_size == 0) r.library_size = full.size();
    use_full(std::string("reduced path failed: ") + e.what());
  }
  return r;
}

}  // namespace eqod
