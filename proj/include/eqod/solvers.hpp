#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/rng.hpp"

namespace eqod {

enum class Pde { heat, burgers, kdv, fisher_kpp, adv_diff, ks, kdv_burgers, react_diff };

/// All eight benchmark equations in table order.
const std::vector<Pde>& all_pdes();

struct PdeSpec {
  Pde pde;
  std::string name;          // CLI / CSV identifier, e.g. "kdv-burgers"
  std::string display_name;  // e.g. "KdV-Burgers"
  CoefficientVector true_coeffs;  // over the ten standard terms
  double domain_length;
  double t_end;
  /// Time integrated and discarded before the first recorded sample.
  double transient;
  bool stiff;
  bool galilean;

  SupportSet true_support() const { return support_from_coeffs(true_coeffs, 1e-12); }
};

PdeSpec pde_spec(Pde pde);
/// Accepts the CLI identifier or the display name, case-insensitively.
std::optional<Pde> parse_pde(std::string_view name);

/// Default benchmark grid for `pde`: [0, L) x [0, t_end] at nx x nt.
Grid1D default_grid(Pde pde, int nx = 128, int nt = 128);

struct SolverOptions {
  double rtol = 1e-7;
  double atol = 1e-9;
  /// Orszag 2/3-rule truncation inside nonlinear right-hand sides.
  bool dealias = true;
  /// Target number of fixed ETDRK4 steps across the recorded KS horizon.
  int etdrk4_steps = 1000;
  /// Contour points for the ETDRK4 phi-function coefficients.
  int etdrk4_contour_points = 32;
  std::int64_t max_steps = 20'000'000;
};

/// Sample the initial-condition family of `pde` on `grid`.
std::vector<double> initial_condition(const PdeSpec& pde, const Grid1D& grid, RngStream& rng);

/// Integrate `pde` from `u0` and sample at the nt uniform grid times.
/// Throws eqod::Error(ErrorKind::blow_up) on non-finite state.
Trajectory solve(const PdeSpec& pde, std::span<const double> u0, const Grid1D& grid,
                 const SolverOptions& options = {});

/// U + sigma * std(U) * Z with std the population standard deviation of U.
Trajectory add_noise(const Trajectory& traj, double sigma, RngStream& rng);

TrajectorySet generate_clean_set(const PdeSpec& pde, const Grid1D& grid, int M, std::uint64_t seed,
                                 const SolverOptions& options = {});

/// Noise for trajectory m drawn from RngStream(seed + 1000, m).
TrajectorySet add_noise(const TrajectorySet& clean, double sigma, std::uint64_t seed);

/// M trajectories: initial condition m from RngStream(seed, m), noise from
/// RngStream(seed + 1000, m).
TrajectorySet generate_set(const PdeSpec& pde, const Grid1D& grid, int M, double sigma,
                           std::uint64_t seed, const SolverOptions& options = {});

}  // namespace eqod
