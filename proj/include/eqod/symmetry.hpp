#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/weakform.hpp"

namespace eqod {

struct SymbolEstimate {
  std::vector<double> k;                      // |wavenumber| of half-spectrum bins
  std::vector<std::complex<double>> sigma;    // estimated growth rate per bin
  std::vector<double> power;                  // sum over used times of |u_hat|^2
  std::vector<bool> reliable;                 // |k| > 0.5 and power > 1% of max
};

/// sigma(k) = sum_i conj(u_hat_i) du_hat_i/dt / sum_i |u_hat_i|^2 with centered
/// time differences, skipping the first and last two samples. Throws when no
/// mode is reliable.
SymbolEstimate estimate_symbol(const Trajectory& traj);

struct Detection {
  bool detected = false;
  /// NaN when the detector could not run on this data.
  double score = 0.0;
  bool valid() const;
};

struct ReflectionResult {
  Detection even;
  Detection odd;
};

struct GalileanResult {
  bool detected = false;
  double energy_fraction = 0.0;
  double c1 = 0.0;
  bool rank_deficient = false;
};

struct SymmetryThresholds {
  double spatial = 0.05;
  double temporal = 0.4;
  double scaling_r2 = 0.90;
  double reflection = 0.1;
  double galilean_tau = 0.05;
  int galilean_nt = 5;
  int galilean_nx = 7;
};

Detection detect_spatial_translation(const Trajectory& traj, const SymmetryThresholds& th = {});
Detection detect_temporal_translation(const Trajectory& traj, const SymmetryThresholds& th = {});
/// Score is the weighted R^2 of the log-log fit; `slope` receives the fitted
/// exponent when given.
Detection detect_scaling(const Trajectory& traj, const SymmetryThresholds& th = {},
                         double* slope = nullptr);
ReflectionResult detect_reflection(const Trajectory& traj, const SymmetryThresholds& th = {});

/// Weak system over [u*u_x, u_xx, u_xxx, u, u^2, u^3] on the Stage-3 test grid,
/// column-normalized minimum-norm least squares, energy fraction
/// f = ||c1 Theta_1||^2 / ||b||^2. Detected iff f > tau and |c1| > tau.
GalileanResult detect_galilean(const TrajectorySet& trajset, const SymmetryThresholds& th = {});
/// The basis used by detect_galilean, u*u_x first.
LibrarySpec galilean_test_basis();

struct SymmetryReport {
  Detection spatial_translation;
  Detection temporal_translation;
  Detection scaling;
  Detection reflection_even;
  Detection reflection_odd;
  GalileanResult galilean;
  std::vector<std::string> notes;
};

/// Galilean test on the whole set; the other detectors run on every
/// trajectory and report the most conservative outcome (detected only if
/// detected on all, worst score). A detector that throws is reported as not
/// detected with a NaN score and a note.
SymmetryReport detect_all(const TrajectorySet& trajset, const SymmetryThresholds& th = {});

}  // namespace eqod
