#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/oplib.hpp"

namespace eqod {

/// exp(-1/(1-r^2)) on |r| < 1, zero elsewhere.
double bump(double r);
/// d/dr bump(r) = -2r/(1-r^2)^2 * bump(r).
double bump_derivative(double r);

struct TestGrid {
  std::vector<double> t_centers;
  std::vector<double> x_centers;
  double r_t = 0.0;
  double r_x = 0.0;

  std::size_t size() const { return t_centers.size() * x_centers.size(); }
};

/// Radii r_t = max(0.18 T, 8 dt), r_x = max(0.20 L, 8 dx); n_t x n_x centers
/// evenly spaced (endpoints included) over the data range shrunk by 1.05 r
/// on each side. Throws when the shrunk range is empty, naming the smallest
/// nt / nx that would work.
TestGrid make_test_grid(const Grid1D& grid, int n_t, int n_x);

struct RowMeta {
  int trajectory;
  double t_center;
  double x_center;
};

struct WeakSystem {
  Eigen::MatrixXd theta;  // rows x |spec|, column-major
  Eigen::VectorXd b;
  LibrarySpec spec;
  std::vector<RowMeta> row_meta;

  Eigen::Index rows() const { return theta.rows(); }
  Eigen::Index cols() const { return theta.cols(); }
  /// Same rows restricted to `sub`, whose terms must all be present here.
  WeakSystem restricted_to(const LibrarySpec& sub) const;
  /// One row per test function: trajectory,t_center,x_center,<terms...>,b
  void write_csv(std::ostream& out) const;
};

/// b = -iint u phi_t and Theta_j = iint theta_j(u) phi for every trajectory
/// and every test-function center, trajectory-major then t-center then
/// x-center. Library fields are evaluated once per trajectory.
WeakSystem assemble(const TrajectorySet& trajset, const LibrarySpec& spec, const TestGrid& tg);

}  // namespace eqod
