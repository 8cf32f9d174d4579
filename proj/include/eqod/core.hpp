#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "eqod/terms.hpp"

namespace eqod {

/// Row-major nt x nx field; row i is the spatial profile at time t_i.
using Field = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform periodic space grid times a uniform time grid. The point x0 + L is
/// identified with x0 and is not stored.
struct Grid1D {
  double x0 = 0.0;
  double length = 0.0;
  int nx = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  int nt = 0;

  double dx() const { return length / nx; }
  double dt() const { return (t_end - t_start) / (nt - 1); }
  double x(int j) const { return x0 + j * dx(); }
  double t(int i) const { return t_start + i * dt(); }

  /// Throws eqod::Error unless every field is in range.
  void validate() const;

  bool operator==(const Grid1D&) const = default;
};

class Trajectory {
 public:
  Trajectory(Grid1D grid, Field values);

  const Grid1D& grid() const { return grid_; }
  const Field& values() const { return values_; }

 private:
  Grid1D grid_;
  Field values_;
};

/// M >= 1 trajectories sharing one grid.
class TrajectorySet {
 public:
  explicit TrajectorySet(std::vector<Trajectory> trajectories);

  const Grid1D& grid() const { return trajectories_.front().grid(); }
  std::size_t size() const { return trajectories_.size(); }
  const Trajectory& operator[](std::size_t m) const { return trajectories_[m]; }
  auto begin() const { return trajectories_.begin(); }
  auto end() const { return trajectories_.end(); }

 private:
  std::vector<Trajectory> trajectories_;
};

using SupportSet = std::set<Term>;

/// Coefficients paired with the terms they multiply, in library order.
class CoefficientVector {
 public:
  CoefficientVector() = default;
  CoefficientVector(std::vector<Term> terms, std::vector<double> values);

  /// All-zero vector over `terms`.
  static CoefficientVector zeros(std::vector<Term> terms);

  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<double>& values() const { return values_; }

  /// Coefficient of `t`, 0 when `t` is not part of this vector.
  double get(const Term& t) const;
  void set(const Term& t, double value);

  /// Same coefficients re-expressed over `universe`; terms missing here read
  /// as 0. Terms outside `universe` are dropped.
  CoefficientVector expressed_over(const std::vector<Term>& universe) const;

 private:
  std::vector<Term> terms_;
  std::vector<double> values_;
};

/// Terms with |value| strictly above `threshold` (> 0).
SupportSet support_from_coeffs(const CoefficientVector& coeffs, double threshold = 1e-3);

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Term-level precision/recall/F1. An empty prediction scores 0 across the
/// board; an empty truth set is rejected.
F1Score f1_score(const SupportSet& pred, const SupportSet& truth);

/// Mean |est - truth| over the ten standard terms (absent terms count as 0).
double coefficient_error(const CoefficientVector& est, const CoefficientVector& truth);

}  // namespace eqod
