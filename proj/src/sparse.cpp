#include "eqod/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "eqod/error.hpp"
#include "eqod/kernels.hpp"
#include "eqod/rng.hpp"

namespace eqod {

std::vector<double> default_lambda_grid() {
  std::vector<double> g(60);
  for (int i = 0; i < 60; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -6.0 + 5.0 * i / 59.0);
  return g;
}

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

LassoResult lasso(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b, double lambda,
                  double coord_tol, int max_sweeps, const Eigen::VectorXd* warm) {
  require(lambda >= 0.0 && std::isfinite(lambda), "lasso: lambda must be >= 0");
  require(theta.rows() == b.size(), "lasso: row count mismatch");
  const auto n = static_cast<std::size_t>(theta.rows());
  const Eigen::Index p = theta.cols();
  const auto& k = kernels::active();

  LassoResult res;
  res.xi = warm ? *warm : Eigen::VectorXd::Zero(p);
  require(res.xi.size() == p, "lasso: warm start has wrong length");
  Eigen::VectorXd sq(p);
  for (Eigen::Index j = 0; j < p; ++j) sq(j) = k.dot(theta.col(j).data(), theta.col(j).data(), n);
  Eigen::VectorXd r = b - theta * res.xi;
  const double half = 0.5 * lambda;

  res.converged = false;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (sq(j) == 0.0) {
        res.xi(j) = 0.0;
        continue;
      }
      const double* col = theta.col(j).data();
      const double old = res.xi(j);
      const double rho = k.dot(col, r.data(), n) + sq(j) * old;
      const double next = soft(rho, half) / sq(j);
      const double delta = next - old;
      if (delta != 0.0) {
        k.axpy(-delta, col, r.data(), n);
        res.xi(j) = next;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    res.sweeps = sweep;
    if (max_delta < coord_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double lasso_objective(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& xi, double lambda) {
  return (b - theta * xi).squaredNorm() + lambda * xi.lpNorm<1>();
}

Eigen::VectorXd ols(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b) {
  if (theta.cols() == 0) return {};
  return theta.completeOrthogonalDecomposition().solve(b);
}

NormalizedSystem normalize(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b) {
  NormalizedSystem s{theta, b, Eigen::VectorXd::Zero(theta.cols()), b.norm()};
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    const double nrm = theta.col(j).norm();
    s.col_norms(j) = nrm;
    if (nrm > 0.0) s.theta.col(j) /= nrm;
  }
  if (s.b_norm > 0.0) s.b /= s.b_norm;
  return s;
}

CvResult lasso_cv(const NormalizedSystem& sys, const LassoConfig& config,
                  const std::vector<std::size_t>& permutation) {
  const Eigen::Index n = sys.theta.rows(), p = sys.theta.cols();
  const int folds = config.cv_folds;
  require(folds >= 2, "lasso_cv: need at least two folds");
  require(n >= folds, "lasso_cv: fewer rows than folds");
  require(static_cast<Eigen::Index>(permutation.size()) == n, "lasso_cv: permutation length mismatch");
  require(!config.lambda_grid.empty(), "lasso_cv: empty lambda grid");

  const auto& grid = config.lambda_grid;
  CvResult res;
  res.mean_scores.assign(grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    const Eigen::Index lo = n * f / folds, hi = n * (f + 1) / folds;
    const Eigen::Index n_test = hi - lo, n_train = n - n_test;
    Eigen::MatrixXd a_tr(n_train, p), a_te(n_test, p);
    Eigen::VectorXd b_tr(n_train), b_te(n_test);
    for (Eigen::Index i = 0, tr = 0, te = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(permutation[static_cast<std::size_t>(i)]);
      if (i >= lo && i < hi) {
        a_te.row(te) = sys.theta.row(row);
        b_te(te++) = sys.b(row);
      } else {
        a_tr.row(tr) = sys.theta.row(row);
        b_tr(tr++) = sys.b(row);
      }
    }
    if (n_train < p) res.underdetermined = true;
    const double den = (b_te.array() - b_te.mean()).square().sum();
    // Walk the path from the largest lambda down so each fit warm-starts
    // from a sparser neighbour.
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(p);
    for (std::size_t li = grid.size(); li-- > 0;) {
      const auto fit = lasso(a_tr, b_tr, config.per_row_penalty ? 2.0 * static_cast<double>(n_train) * grid[li] : grid[li], config.coord_tol, config.max_sweeps, &xi);
      xi = fit.xi;
      res.converged = res.converged && fit.converged;
      const double num = (b_te - a_te * xi).squaredNorm();
      const double r2 = den > 0.0 ? 1.0 - num / den : (num == 0.0 ? 1.0 : -num);
      res.mean_scores[li] += r2 / folds;
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < grid.size(); ++li) {
    if (res.mean_scores[li] > best) {
      best = res.mean_scores[li];
      res.lambda_index = li;
    }
  }
  res.lambda_star = grid[res.lambda_index];
  const auto fit = lasso(sys.theta, sys.b, config.per_row_penalty ? 2.0 * static_cast<double>(n) * res.lambda_star : res.lambda_star, config.coord_tol, config.max_sweeps);
  res.xi_norm = fit.xi;
  res.converged = res.converged && fit.converged;
  return res;
}

CvResult lasso_cv(const NormalizedSystem& sys, const LassoConfig& config, std::uint64_t seed) {
  RngStream rng(seed, streams::cv_permutation);
  return lasso_cv(sys, config, rng.permutation(static_cast<std::size_t>(sys.theta.rows())));
}

void write_cv_curve_csv(std::ostream& out, const LassoConfig& config, const CvResult& cv) {
  out << "lambda,mean_r2,selected\n" << std::setprecision(17);
  for (std::size_t i = 0; i < config.lambda_grid.size(); ++i)
    out << config.lambda_grid[i] << ',' << cv.mean_scores[i] << ',' << (i == cv.lambda_index ? 1 : 0)
        << '\n';
}

StageThreeResult identify_system(const WeakSystem& sys, std::uint64_t seed,
                                 const LassoConfig& lasso_cfg, const IdentifyConfig& id_cfg) {
  const Eigen::Index p = sys.cols();
  const NormalizedSystem ns = normalize(sys.theta, sys.b);
  StageThreeResult out{CoefficientVector::zeros(sys.spec.terms()), {}};
  if (ns.b_norm == 0.0) {
    out.cv.xi_norm = Eigen::VectorXd::Zero(p);
    out.cv.mean_scores.assign(lasso_cfg.lambda_grid.size(), 0.0);
    return out;
  }
  out.cv = lasso_cv(ns, lasso_cfg, seed);

  Eigen::VectorXd xi(p);
  for (Eigen::Index j = 0; j < p; ++j)
    xi(j) = ns.col_norms(j) > 0.0 ? out.cv.xi_norm(j) / ns.col_norms(j) * ns.b_norm : 0.0;

  for (int round = 0; round < id_cfg.debias_rounds; ++round) {
    const double eta = std::max(id_cfg.threshold_floor, id_cfg.threshold_frac * xi.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < p; ++j)
      if (std::abs(xi(j)) >= eta) keep.push_back(j);
    xi.setZero();
    if (keep.empty()) break;
    Eigen::MatrixXd sub(sys.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = sys.theta.col(keep[c]);
    const Eigen::VectorXd coef = ols(sub, sys.b);
    for (std::size_t c = 0; c < keep.size(); ++c) xi(keep[c]) = coef(static_cast<Eigen::Index>(c));
  }
  for (Eigen::Index j = 0; j < p; ++j) out.coeffs.set(sys.spec[static_cast<std::size_t>(j)], xi(j));
  return out;
}

StageThreeResult wf_lasso_identify(const TrajectorySet& trajset, const LibrarySpec& spec,
                                   std::uint64_t seed, const LassoConfig& lasso_cfg,
                                   const IdentifyConfig& id_cfg) {
  const TestGrid tg = make_test_grid(trajset.grid(), id_cfg.test_nt, id_cfg.test_nx);
  return identify_system(assemble(trajset, spec, tg), seed, lasso_cfg, id_cfg);
}

}  // namespace eqod
