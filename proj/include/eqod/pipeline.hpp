#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/oplib.hpp"
#include "eqod/sparse.hpp"
#include "eqod/stability.hpp"
#include "eqod/symmetry.hpp"

namespace eqod {

enum class SelectionMode { symmetry, stability, baseline };

std::string_view mode_name(SelectionMode m);

struct PipelineConfig {
  SymmetryThresholds symmetry;
  StabilityConfig stability;
  LassoConfig lasso;
  IdentifyConfig identify;
  double gamma_symmetry = 1.5;
  double gamma_stability = 1.2;
  /// Full candidate library; the standard ten terms unless a scaling
  /// experiment substitutes an expanded one.
  std::optional<LibrarySpec> full_library;

  LibrarySpec base_library() const { return full_library ? *full_library : standard_library(); }
};

struct IdentificationResult {
  CoefficientVector coeffs;  // over the full library, zeros for absent terms
  SelectionMode mode = SelectionMode::baseline;
  bool fallback_triggered = false;
  LibrarySpec library_used = standard_library();
  /// Size of the reduced library, recorded before any fallback.
  std::size_t library_size = 0;
  std::optional<SymmetryReport> symmetry_report;
  std::optional<StabilityResult> stability;
  /// ||r_reduced||^2 / ||r_full||^2 on the shared Stage-3 rows (NaN for the
  /// baseline).
  double residual_ratio = 0.0;
  double lambda_star = 0.0;
  std::vector<std::string> diagnostics;

  SupportSet support(double threshold = 1e-3) const { return support_from_coeffs(coeffs, threshold); }
};

/// Symmetry detection, library reduction (symmetry path when
/// Galilean invariance is detected, stability selection otherwise), Stage-3
/// WF-LASSO on the reduced library, and the residual fallback to the
/// full-library fit when the residual ratio exceeds gamma (strictly).
IdentificationResult run_eqod(const TrajectorySet& trajset, std::uint64_t seed,
                              const PipelineConfig& config = {});

/// Stage 3 alone on the full library.
IdentificationResult run_wf_lasso_baseline(const TrajectorySet& trajset, std::uint64_t seed,
                                           const PipelineConfig& config = {});

}  // namespace eqod
