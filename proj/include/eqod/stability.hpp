#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/oplib.hpp"
#include "eqod/weakform.hpp"

namespace eqod {

struct StabilityConfig {
  int B = 50;
  double pi_threshold = 0.5;
  double lambda = 1e-3;
  /// Each subsample solves (1/2n)||b - A xi||^2 + lambda ||xi||_1, i.e. the
  /// plain objective at 2 n lambda. Off gives the plain objective at lambda.
  bool per_row_penalty = true;
  double weight_lo = 0.5;
  double weight_hi = 1.0;
  double activity_eps = 1e-6;
  double coord_tol = 1e-9;
  int max_sweeps = 10'000;
  int test_nt = 8;
  int test_nx = 10;
  /// Worker threads for the B iterations; results do not depend on it.
  int threads = 1;
};

struct StabilityResult {
  std::vector<double> pi;            // per column, in k/B steps
  std::vector<std::size_t> stable;   // columns with pi > pi_threshold, ascending
};

/// Randomized-LASSO stability selection. Theta columns and b are normalized
/// once; iteration b draws its half-subsample (shuffle-and-take) and then its
/// penalty weights w ~ U(weight_lo, weight_hi) from
/// RngStream(seed, streams::stability_base + b) and fits the subsampled design
/// Theta_I diag(1/w) at the fixed lambda.
StabilityResult stability_select(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b,
                                 const StabilityConfig& config, std::uint64_t seed);

struct StabilityGate {
  LibrarySpec library;
  StabilityResult selection;
  LibrarySpec base;
  bool empty_fallback = false;
};

/// Assemble on the dense test grid over `base`, select, and return the stable
/// terms; an empty stable set returns `base` unchanged.
StabilityGate stability_gate(const TrajectorySet& trajset, const LibrarySpec& base,
                             std::uint64_t seed, const StabilityConfig& config = {});

/// term,probability rows in library order.
void write_stability_csv(std::ostream& out, const LibrarySpec& spec, const StabilityResult& r);

}  // namespace eqod
