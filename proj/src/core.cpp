#include "eqod/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqod/error.hpp"

namespace eqod {

void Grid1D::validate() const {
  std::ostringstream msg;
  if (!(length > 0.0) || !std::isfinite(length)) msg << "grid length must be positive; ";
  if (nx < 8) msg << "nx must be >= 8 (got " << nx << "); ";
  if (nt < 8) msg << "nt must be >= 8 (got " << nt << "); ";
  if (!(t_end > t_start) || !std::isfinite(t_end) || !std::isfinite(t_start))
    msg << "t_end must exceed t_start; ";
  if (!std::isfinite(x0)) msg << "x0 must be finite; ";
  const auto s = msg.str();
  if (!s.empty()) fail("invalid grid: " + s.substr(0, s.size() - 2));
}

Trajectory::Trajectory(Grid1D grid, Field values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.rows() == grid_.nt && values_.cols() == grid_.nx,
          "trajectory shape " + std::to_string(values_.rows()) + "x" +
              std::to_string(values_.cols()) + " does not match grid " + std::to_string(grid_.nt) +
              "x" + std::to_string(grid_.nx));
  require(values_.allFinite(), "trajectory contains non-finite values");
}

TrajectorySet::TrajectorySet(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  require(!trajectories_.empty(), "trajectory set must hold at least one trajectory");
  for (const auto& t : trajectories_)
    require(t.grid() == trajectories_.front().grid(), "trajectories must share one grid");
}

CoefficientVector::CoefficientVector(std::vector<Term> terms, std::vector<double> values)
    : terms_(std::move(terms)), values_(std::move(values)) {
  require(terms_.size() == values_.size(), "coefficient vector: term/value count mismatch");
  for (double v : values_) require(std::isfinite(v), "coefficient vector: non-finite value");
}

CoefficientVector CoefficientVector::zeros(std::vector<Term> terms) {
  std::vector<double> v(terms.size(), 0.0);
  return CoefficientVector(std::move(terms), std::move(v));
}

double CoefficientVector::get(const Term& t) const {
  const auto it = std::find(terms_.begin(), terms_.end(), t);
  return it == terms_.end() ? 0.0 : values_[static_cast<std::size_t>(it - terms_.begin())];
}

void CoefficientVector::set(const Term& t, double value) {
  require(std::isfinite(value), "coefficient vector: non-finite value");
  const auto it = std::find(terms_.begin(), terms_.end(), t);
  if (it == terms_.end()) {
    terms_.push_back(t);
    values_.push_back(value);
  } else {
    values_[static_cast<std::size_t>(it - terms_.begin())] = value;
  }
}

CoefficientVector CoefficientVector::expressed_over(const std::vector<Term>& universe) const {
  std::vector<double> v;
  v.reserve(universe.size());
  for (const auto& t : universe) v.push_back(get(t));
  return CoefficientVector(universe, std::move(v));
}

SupportSet support_from_coeffs(const CoefficientVector& coeffs, double threshold) {
  require(threshold > 0.0, "support threshold must be positive");
  SupportSet s;
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    if (std::abs(coeffs.values()[j]) > threshold) s.insert(coeffs.terms()[j]);
  return s;
}

F1Score f1_score(const SupportSet& pred, const SupportSet& truth) {
  require(!truth.empty(), "f1_score: true support is empty, recall is undefined");
  std::size_t hits = 0;
  for (const auto& t : pred) hits += truth.count(t);
  F1Score s;
  s.precision = pred.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pred.size());
  s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

double coefficient_error(const CoefficientVector& est, const CoefficientVector& truth) {
  const auto& universe = standard_terms();
  double sum = 0.0;
  for (const auto& t : universe) sum += std::abs(est.get(t) - truth.get(t));
  return sum / static_cast<double>(universe.size());
}

}  // namespace eqod
