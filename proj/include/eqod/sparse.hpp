#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/weakform.hpp"

namespace eqod {

/// 60 log-spaced values on [1e-6, 1e-1], ascending.
std::vector<double> default_lambda_grid();

struct LassoConfig {
  std::vector<double> lambda_grid = default_lambda_grid();
  int cv_folds = 5;
  /// Grid values mean (1/2n)||b - A xi||^2 + lambda ||xi||_1 when set.
  bool per_row_penalty = false;
  double coord_tol = 1e-9;
  int max_sweeps = 10'000;
};

struct IdentifyConfig {
  double threshold_floor = 1e-3;
  double threshold_frac = 0.03;
  int debias_rounds = 2;
  int test_nt = 5;
  int test_nx = 7;
};

struct LassoResult {
  Eigen::VectorXd xi;
  int sweeps = 0;
  bool converged = true;
};

/// Cyclic coordinate descent on ||b - Theta xi||^2 + lambda ||xi||_1.
/// Columns are expected to be unit-norm but any nonzero norm is handled;
/// all-zero columns stay at 0. `warm` seeds the iteration when given.
LassoResult lasso(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b, double lambda,
                  double coord_tol = 1e-9, int max_sweeps = 10'000,
                  const Eigen::VectorXd* warm = nullptr);

/// ||b - Theta xi||^2 + lambda ||xi||_1
double lasso_objective(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& xi, double lambda);

/// Minimum-norm least squares.
Eigen::VectorXd ols(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b);

/// Column norms (zero columns report 0) and the normalized copy of Theta.
struct NormalizedSystem {
  Eigen::MatrixXd theta;
  Eigen::VectorXd b;
  Eigen::VectorXd col_norms;
  double b_norm = 0.0;
};
NormalizedSystem normalize(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b);

struct CvResult {
  double lambda_star = 0.0;
  std::size_t lambda_index = 0;
  Eigen::VectorXd xi_norm;  // normalized units
  std::vector<double> mean_scores;  // aligned with the lambda grid
  bool underdetermined = false;
  bool converged = true;
};

/// K-fold CV over the lambda grid on the normalized system. Rows are taken in
/// `permutation` order and split into contiguous folds; the score is mean
/// held-out R^2, ties go to the smaller lambda, and the final fit uses every
/// row at lambda*.
CvResult lasso_cv(const NormalizedSystem& sys, const LassoConfig& config,
                  const std::vector<std::size_t>& permutation);
/// Same with the permutation drawn from RngStream(seed, streams::cv_permutation).
CvResult lasso_cv(const NormalizedSystem& sys, const LassoConfig& config, std::uint64_t seed);

void write_cv_curve_csv(std::ostream& out, const LassoConfig& config, const CvResult& cv);

struct StageThreeResult {
  CoefficientVector coeffs;  // physical units over the system's spec
  CvResult cv;
};

/// lasso_cv, rescale xi_j = xi_norm_j / ||Theta_j|| * ||b||, then
/// debias_rounds x {zero |xi| < eta, OLS on the survivors} with
/// eta = max(floor, frac * max|xi|) recomputed from the latest values.
StageThreeResult identify_system(const WeakSystem& sys, std::uint64_t seed,
                                 const LassoConfig& lasso_cfg = {},
                                 const IdentifyConfig& id_cfg = {});

/// Assemble on the Stage-3 test grid and run identify_system.
StageThreeResult wf_lasso_identify(const TrajectorySet& trajset, const LibrarySpec& spec,
                                   std::uint64_t seed, const LassoConfig& lasso_cfg = {},
                                   const IdentifyConfig& id_cfg = {});

}  // namespace eqod
